"""Fork sequential consistency by searching a shared prefix tree of views.

No-join says two views agree up to their last common operation and share
nothing afterwards, so a set of views is a tree rooted at the empty sequence
in which every operation labels at most one node and each client's view is a
root path. The search grows that tree: a group of clients extends a common
path together and may split into groups that continue independently.

Two facts keep the tree small:

* An operation that is complete in σ must appear in its owner's view, so it
  can only sit on a path its owner still follows. A group path therefore
  holds its members' operations, in order and without gaps, plus operations
  that only the extension completed ("floating" operations).
* A client whose own operations are all placed can stop at the current node;
  continuing never relaxes a constraint.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product

from forkcheck.checkers.extensions import enumerate_extensions
from forkcheck.checkers.patterns import fork_join_chain
from forkcheck.checkers.sequential import SearchCounter, unknown_value_read
from forkcheck.errors import BudgetExceeded
from forkcheck.history.operations import (
    ensure_well_formed,
    preserves_client_order,
    prefix_through,
)
from forkcheck.history.registers import check_sequential_spec, ensure_checkable
from forkcheck.models import (
    BOTTOM,
    Event,
    Explanation,
    ExplanationStep,
    Extension,
    FscVerdict,
    History,
    Operation,
    Outcome,
    RegisterSpec,
    SearchBudget,
    Value,
    View,
)

logger = logging.getLogger(__name__)

OpId = tuple[int, int]


def check_no_join(v1: View, v2: View) -> Operation | None:
    """Return the earliest operation shared by both views whose prefixes differ."""
    in_v2 = set(v2.op_ids)
    for op in v1.ops:
        if op.op_id not in in_v2:
            continue
        if prefix_through(v1, op).op_ids != prefix_through(v2, op).op_ids:
            return op
    return None


def _binary_splits(group: tuple[int, ...]) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Every split of *group* into two non-empty blocks, the first holding group[0]."""
    head, rest = group[0], group[1:]
    splits = []
    for mask in range(2 ** len(rest) - 1):
        first = (head,) + tuple(c for i, c in enumerate(rest) if mask >> i & 1)
        second = tuple(c for i, c in enumerate(rest) if not mask >> i & 1)
        splits.append((first, second))
    return splits


@dataclass
class _ViewTreeSearch:
    """Search for fork views over one extension."""
    required: dict[int, list[Operation]]
    floating: dict[OpId, Operation]
    counter: SearchCounter
    failed: set = field(default_factory=set)

    def run(self, group: tuple[int, ...]) -> dict[int, View] | None:
        cursors = {c: 0 for c in group}
        return self._solve(group, cursors, {}, frozenset(self.floating), [])

    def _solve(
        self,
        group: tuple[int, ...],
        cursors: dict[int, int],
        store: dict[str, Value],
        floating: frozenset[OpId],
        path: list[Operation],
    ) -> dict[int, View] | None:
        self.counter.expand()
        views = {
            c: View(owner=c, ops=tuple(path))
            for c in group if cursors[c] == len(self.required[c])
        }
        group = tuple(c for c in group if c not in views)
        if not group:
            return views

        key = (
            group,
            tuple(cursors[c] for c in group),
            tuple(sorted(store.items())),
            floating,
        )
        if key in self.failed:
            return None

        for op in self._candidates(group, cursors, floating):
            if op.is_read:
                if op.returned_value != store.get(op.reg, BOTTOM):
                    continue
                next_store = store
            else:
                next_store = {**store, op.reg: op.written_value}
            next_cursors = cursors
            next_floating = floating
            if op.op_id in floating:
                next_floating = floating - {op.op_id}
            else:
                next_cursors = {**cursors, op.client: cursors[op.client] + 1}
            path.append(op)
            found = self._solve(group, next_cursors, next_store, next_floating, path)
            path.pop()
            if found is not None:
                return {**views, **found}

        if len(group) > 1:
            found = self._split(group, cursors, store, floating, path)
            if found is not None:
                return {**views, **found}

        self.failed.add(key)
        return None

    def _candidates(
        self, group: tuple[int, ...], cursors: dict[int, int], floating: frozenset[OpId]
    ) -> list[Operation]:
        ops = [
            self.required[c][cursors[c]]
            for c in group if cursors[c] < len(self.required[c])
        ]
        # A floating operation is its owner's last; it waits until the owner has left the group.
        ops.extend(
            self.floating[op_id] for op_id in sorted(floating) if op_id[0] not in group
        )
        return ops

    def _split(
        self,
        group: tuple[int, ...],
        cursors: dict[int, int],
        store: dict[str, Value],
        floating: frozenset[OpId],
        path: list[Operation],
    ) -> dict[int, View] | None:
        ordered = sorted(floating)
        for first, second in _binary_splits(group):
            for owners in product((0, 1), repeat=len(ordered)):
                shares = (
                    frozenset(o for o, b in zip(ordered, owners) if b == 0),
                    frozenset(o for o, b in zip(ordered, owners) if b == 1),
                )
                left = self._solve(first, cursors, store, shares[0], list(path))
                if left is None:
                    continue
                right = self._solve(second, cursors, store, shares[1], list(path))
                if right is not None:
                    return {**left, **right}
        return None


def _solo_view(
    client: int,
    required: dict[int, list[Operation]],
    floating: dict[OpId, Operation],
    counter: SearchCounter,
) -> bool:
    """Whether C_<client> alone has a view meeting conditions 1-3.

    The client's own operations must all be placed; any other operation may
    be placed or skipped, keeping each client's order.
    """
    lanes = {c: list(ops) for c, ops in required.items()}
    for op in floating.values():
        if op.client != client:
            lanes.setdefault(op.client, []).append(op)
    order = sorted(lanes)
    mine = order.index(client)
    failed: set = set()

    def solve(cursors: tuple[int, ...], store: dict[str, Value]) -> bool:
        if cursors[mine] == len(lanes[client]):
            return True
        key = (cursors, tuple(sorted(store.items())))
        if key in failed:
            return False
        counter.expand()
        for i, c in enumerate(order):
            if cursors[i] == len(lanes[c]):
                continue
            op = lanes[c][cursors[i]]
            advanced = cursors[:i] + (cursors[i] + 1,) + cursors[i + 1:]
            if c != client and solve(advanced, store):
                return True
            if op.is_read and op.returned_value != store.get(op.reg, BOTTOM):
                continue
            next_store = {**store, op.reg: op.written_value} if op.is_write else store
            if solve(advanced, next_store):
                return True
        failed.add(key)
        return False

    return solve(tuple(0 for _ in order), {})


def _fork_inputs(
    history: History, extension: Extension
) -> tuple[dict[int, list[Operation]], dict[OpId, Operation]]:
    """Split the extension's complete operations into owner-required and floating writes."""
    completed_now = extension.completed_ids
    required: dict[int, list[Operation]] = {c: [] for c in history.clients}
    floating: dict[OpId, Operation] = {}
    for op in extension.history.operations:
        if not op.is_complete:
            continue
        if op.op_id in completed_now:
            # Reads completed only by the extension constrain a view without helping it.
            if op.is_write:
                floating[op.op_id] = op
            continue
        required.setdefault(op.client, []).append(op)
    return required, floating


def check_fork_sequential_consistency(
    history: History,
    spec: RegisterSpec,
    budget: SearchBudget | None = None,
) -> FscVerdict:
    """Decide whether *history* is fork-sequentially-consistent.

    Pass iff some extension σ′ admits, for each client C_i, a view π_i over a
    subsequence of complete(σ′) that contains C_i's operations complete in σ,
    keeps every client's real-time order, satisfies the register
    specification, and shares identical prefixes with every other view up to
    each common operation.
    """
    ensure_well_formed(history)
    ensure_checkable(history, spec)
    budget = budget or SearchBudget.from_settings()
    counter = SearchCounter(budget)

    if len(history.operations) > budget.max_ops:
        return FscVerdict(
            outcome=Outcome.INCONCLUSIVE,
            reason=Explanation(summary=f"history has more than {budget.max_ops} operations"),
            budget_used=counter.usage(),
        )

    forged = unknown_value_read(history)
    if forged is not None:
        return FscVerdict(
            outcome=Outcome.FAIL,
            reason=Explanation(
                summary=f"condition 3 cannot hold for the view of C{forged.client}",
                steps=[ExplanationStep(
                    condition="3",
                    message=f"{forged.describe()} returns a value that no operation writes",
                    operations=[forged.label],
                )],
            ),
            budget_used=counter.usage(),
        )

    tried: set[frozenset[OpId]] = set()
    try:
        for extension in enumerate_extensions(history, spec, budget):
            required, floating = _fork_inputs(history, extension)
            if frozenset(floating) in tried:
                continue
            tried.add(frozenset(floating))
            counter.extensions += 1
            search = _ViewTreeSearch(required, floating, counter)
            views = search.run(tuple(sorted(required)))
            if views is not None:
                logger.debug(
                    "fork-sequentially-consistent after %d extensions, %d nodes",
                    counter.extensions, counter.nodes,
                )
                return FscVerdict(
                    outcome=Outcome.PASS,
                    views=dict(sorted(views.items())),
                    extension=extension,
                    budget_used=counter.usage(),
                )
        reason = _first_unsatisfiable(history, spec, counter)
    except BudgetExceeded as exc:
        logger.debug("fork consistency search gave up: %s", exc)
        return FscVerdict(
            outcome=Outcome.INCONCLUSIVE,
            reason=Explanation(summary=f"search budget exhausted: {exc}"),
            budget_used=counter.usage(),
        )

    return FscVerdict(outcome=Outcome.FAIL, reason=reason, budget_used=counter.usage())


def _first_unsatisfiable(
    history: History, spec: RegisterSpec, counter: SearchCounter
) -> Explanation:
    """Name the first condition that cannot be met.

    If some client has no view satisfying conditions 1-3 even on its own, the
    failure is local to that client; otherwise it is no-join.
    """
    for client in history.clients:
        alone = False
        for extension in enumerate_extensions(history, spec, counter.budget):
            required, floating = _fork_inputs(history, extension)
            if _solo_view(client, required, floating, counter):
                alone = True
                break
        if not alone:
            own = [op.label for op in required.get(client, [])]
            return Explanation(
                summary=f"conditions 1-3 cannot hold for the view of C{client}",
                steps=[ExplanationStep(
                    condition="3",
                    message=f"no legal sequential order contains the complete operations of C{client}",
                    operations=own,
                )],
            )

    chain = fork_join_chain(history)
    steps = chain.steps if chain else []
    return Explanation(
        summary="condition 4 (no-join) cannot hold: every client has a legal view, "
        "but no choice of views agrees on the prefixes of shared operations",
        steps=steps,
    )


def verify_fork_views(
    history: History,
    views: dict[int, View],
    spec: RegisterSpec,
    appended: tuple[Event, ...] = (),
) -> str | None:
    """Re-check fork views with the independent predicates; return the first failure.

    *history* is σ and *appended* the extension's responses. Views draw from
    complete(σ′) but owe their owner only the operations complete in σ.
    """
    extended = History(events=history.events + appended) if appended else history
    available = {op.op_id: op for op in extended.operations if op.is_complete}
    for client, view in views.items():
        included = set(view.op_ids)
        if len(included) != len(view.ops):
            return f"view of C{client} repeats an operation"
        stray = next((op for op in view.ops if available.get(op.op_id) != op), None)
        if stray is not None:
            return f"view of C{client} holds {stray.label or stray.op_id}, not a complete operation"
        for op in history.by_client(client):
            if op.is_complete and op.op_id not in included:
                return f"condition 1: {op.label} missing from the view of C{client}"
        if not preserves_client_order(view, extended):
            return f"condition 2: the view of C{client} inverts a client's real-time order"
        violation = check_sequential_spec(view, spec)
        if violation is not None:
            return f"condition 3 in the view of C{client}: {violation.describe()}"
    clients = sorted(views)
    for i, a in enumerate(clients):
        for b in clients[i + 1:]:
            joined = check_no_join(views[a], views[b])
            if joined is not None:
                return f"condition 4: views of C{a} and C{b} differ before {joined.label}"
    return None
