"""Sequential consistency by memoized backtracking.

A permutation π of complete(σ′) preserves every client's real-time order
exactly when it is an interleaving of the clients' operation sequences, so
the search state is one cursor per client. With one writer per register the
register contents are a function of the cursors, which makes the cursor
tuple a complete memo key for refuted states.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from forkcheck.checkers.extensions import enumerate_extensions
from forkcheck.errors import BudgetExceeded
from forkcheck.history.operations import complete_ops, ensure_well_formed
from forkcheck.history.registers import ensure_checkable
from forkcheck.models import (
    BOTTOM,
    BudgetUsage,
    Explanation,
    ExplanationStep,
    Extension,
    History,
    Operation,
    Outcome,
    RegisterSpec,
    ScVerdict,
    SearchBudget,
    Value,
    View,
)

logger = logging.getLogger(__name__)


@dataclass
class SearchCounter:
    """Shared node/extension accounting for one checker call."""
    budget: SearchBudget
    nodes: int = 0
    extensions: int = 0

    def expand(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise BudgetExceeded(f"more than {self.budget.max_nodes} search nodes")

    def usage(self) -> BudgetUsage:
        return BudgetUsage(extensions=self.extensions, nodes=self.nodes)


def client_lanes(ops: tuple[Operation, ...]) -> list[list[Operation]]:
    """Operations grouped per client (ascending client id), each in invocation order."""
    lanes: dict[int, list[Operation]] = {}
    for op in sorted(ops, key=lambda o: (o.client, o.inv_index)):
        lanes.setdefault(op.client, []).append(op)
    return [lanes[c] for c in sorted(lanes)]


def unknown_value_read(history: History) -> Operation | None:
    """The first complete read returning a value never written to its register."""
    written = {
        (op.reg, op.written_value) for op in history.operations if op.is_write
    }
    for op in history.operations:
        value = op.returned_value
        if op.is_read and value is not None and not value.is_bottom:
            if (op.reg, value) not in written:
                return op
    return None


@dataclass
class _Interleaver:
    lanes: list[list[Operation]]
    counter: SearchCounter
    failed: set[tuple[int, ...]] = field(default_factory=set)
    deepest: list[Operation] = field(default_factory=list)

    def run(self) -> list[Operation] | None:
        return self._extend(tuple(0 for _ in self.lanes), {}, [])

    def _extend(
        self, cursors: tuple[int, ...], store: dict[str, Value], path: list[Operation]
    ) -> list[Operation] | None:
        if all(c == len(lane) for c, lane in zip(cursors, self.lanes)):
            return list(path)
        if cursors in self.failed:
            return None
        self.counter.expand()
        if len(path) > len(self.deepest):
            self.deepest = list(path)

        for i, lane in enumerate(self.lanes):
            if cursors[i] == len(lane):
                continue
            op = lane[cursors[i]]
            if op.is_read:
                if op.returned_value != store.get(op.reg, BOTTOM):
                    continue
                next_store = store
            else:
                next_store = {**store, op.reg: op.written_value}
            path.append(op)
            found = self._extend(cursors[:i] + (cursors[i] + 1,) + cursors[i + 1:], next_store, path)
            path.pop()
            if found is not None:
                return found
        self.failed.add(cursors)
        return None


def check_sequential_consistency(
    history: History,
    spec: RegisterSpec,
    budget: SearchBudget | None = None,
) -> ScVerdict:
    """Decide whether *history* is sequentially consistent.

    Pass iff some extension σ′ admits a permutation π of complete(σ′) in which
    every π|C_i keeps C_i's real-time order and every read returns the latest
    preceding write (or ⊥). Real-time order across clients is not required.
    """
    ensure_well_formed(history)
    ensure_checkable(history, spec)
    budget = budget or SearchBudget.from_settings()
    counter = SearchCounter(budget)

    if len(history.operations) > budget.max_ops:
        return ScVerdict(
            outcome=Outcome.INCONCLUSIVE,
            reason=Explanation(summary=f"history has more than {budget.max_ops} operations"),
            budget_used=counter.usage(),
        )

    forged = unknown_value_read(history)
    if forged is not None:
        return ScVerdict(
            outcome=Outcome.FAIL,
            reason=Explanation(
                summary="a read returns a value that no operation writes",
                steps=[ExplanationStep(
                    condition="2",
                    message=f"{forged.describe()} cannot be satisfied by any write to {forged.reg}",
                    operations=[forged.label],
                )],
            ),
            budget_used=counter.usage(),
        )

    deepest: list[Operation] = []
    try:
        for extension in enumerate_extensions(history, spec, budget):
            counter.extensions += 1
            search = _Interleaver(client_lanes(complete_ops(extension.history)), counter)
            pi = search.run()
            if pi is not None:
                logger.debug(
                    "sequentially consistent after %d extensions, %d nodes",
                    counter.extensions, counter.nodes,
                )
                return ScVerdict(
                    outcome=Outcome.PASS,
                    witness=View(ops=tuple(pi)),
                    extension=extension,
                    budget_used=counter.usage(),
                )
            if len(search.deepest) > len(deepest):
                deepest = search.deepest
    except BudgetExceeded as exc:
        logger.debug("sequential consistency search gave up: %s", exc)
        return ScVerdict(
            outcome=Outcome.INCONCLUSIVE,
            reason=Explanation(summary=f"search budget exhausted: {exc}"),
            budget_used=counter.usage(),
        )

    return ScVerdict(
        outcome=Outcome.FAIL,
        reason=_refutation(history, deepest),
        budget_used=counter.usage(),
    )


def _refutation(history: History, deepest: list[Operation]) -> Explanation:
    """Describe where the longest legal interleaving got stuck."""
    placed = {op.op_id for op in deepest}
    store: dict[str, Value] = {}
    for op in deepest:
        if op.is_write:
            store[op.reg] = op.written_value
    blocked = []
    for lane in client_lanes(complete_ops(history)):
        nxt = next((op for op in lane if op.op_id not in placed), None)
        if nxt is not None and nxt.is_read:
            blocked.append(nxt)
    steps = [ExplanationStep(
        condition="1",
        message="longest interleaving that keeps each client's order and every read legal: "
        + (", ".join(op.label or op.describe() for op in deepest) or "(empty)"),
        operations=[op.label for op in deepest],
    )]
    for op in blocked:
        steps.append(ExplanationStep(
            condition="2",
            message=f"{op.describe()} cannot follow it: {op.reg} holds "
            f"{store.get(op.reg, BOTTOM)}",
            operations=[op.label],
        ))
    return Explanation(
        summary="no extension admits a permutation of the complete operations that keeps "
        "each client's order and satisfies the register specification",
        steps=steps,
    )
