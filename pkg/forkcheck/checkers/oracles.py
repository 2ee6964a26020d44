"""Unpruned reference deciders, used to cross-check the searching checkers.

They share no code with the searches: extensions, permutations and view
tuples are enumerated outright and checked with the plain predicates.
"""

from __future__ import annotations

from itertools import combinations, permutations, product

from forkcheck.history.operations import (
    ensure_well_formed,
    preserves_client_order,
    prefix_through,
)
from forkcheck.history.registers import check_sequential_spec
from forkcheck.models import (
    BOTTOM,
    Event,
    EventKind,
    History,
    Operation,
    Outcome,
    RegisterSpec,
    View,
)

SC_ORACLE_CAP = 8
FSC_ORACLE_CAP = 6

_DROP = object()


def _all_extensions(history: History) -> list[History]:
    pending = [op for op in history.operations if not op.is_complete]
    written: dict[str, list] = {}
    for op in history.operations:
        if op.is_write:
            written.setdefault(op.reg, []).append(op.written_value)

    choices = []
    for op in pending:
        options: list = [_DROP]
        if op.is_write:
            options.append(None)
        else:
            options.extend([BOTTOM, *written.get(op.reg, [])])
        choices.append(options)

    extended = []
    for picks in product(*choices):
        appended = []
        for op, pick in zip(pending, picks):
            if pick is _DROP:
                continue
            appended.append(Event(
                kind=EventKind.RESPONSE, client=op.client, op_kind=op.op_kind,
                reg=op.reg, value=pick,
                index=len(history.events) + len(appended), label=op.label,
            ))
        extended.append(History(events=history.events + tuple(appended)))
    return extended


def _completed(history: History) -> list[Operation]:
    return [op for op in history.operations if op.is_complete]


def brute_force_sc_oracle(history: History, spec: RegisterSpec) -> Outcome:
    """Every extension times every permutation, no pruning."""
    ensure_well_formed(history)
    if len(_completed(history)) > SC_ORACLE_CAP:
        raise ValueError(f"SC oracle is capped at {SC_ORACLE_CAP} complete operations")
    for extended in _all_extensions(history):
        ops = _completed(extended)
        for order in permutations(ops):
            view = View(ops=order)
            if preserves_client_order(view) and check_sequential_spec(view, spec) is None:
                return Outcome.PASS
    return Outcome.FAIL


def _candidate_views(client: int, history: History, ops: list[Operation], spec: RegisterSpec) -> list[View]:
    """Views satisfying conditions 1-3 for one client."""
    own = {op.op_id for op in history.operations if op.client == client and op.is_complete}
    views = []
    for size in range(len(ops) + 1):
        for subset in combinations(ops, size):
            if not own <= {op.op_id for op in subset}:
                continue
            for order in permutations(subset):
                view = View(owner=client, ops=order)
                if preserves_client_order(view) and check_sequential_spec(view, spec) is None:
                    views.append(view)
    return views


def _compatible(a: View, b: View) -> bool:
    shared = set(a.op_ids) & set(b.op_ids)
    return all(
        prefix_through(a, op).op_ids == prefix_through(b, op).op_ids
        for op in a.ops if op.op_id in shared
    )


def brute_force_fsc_oracle(history: History, spec: RegisterSpec) -> Outcome:
    """All subsequence/permutation tuples meeting conditions 1-3, filtered by pairwise no-join."""
    ensure_well_formed(history)
    if len(_completed(history)) > FSC_ORACLE_CAP:
        raise ValueError(f"FSC oracle is capped at {FSC_ORACLE_CAP} complete operations")
    clients = history.clients
    for extended in _all_extensions(history):
        ops = _completed(extended)
        candidates = [_candidate_views(c, history, ops, spec) for c in clients]
        if any(not views for views in candidates):
            continue
        if _pick_compatible(candidates, []):
            return Outcome.PASS
    return Outcome.FAIL


def _pick_compatible(candidates: list[list[View]], chosen: list[View]) -> bool:
    if len(chosen) == len(candidates):
        return True
    for view in candidates[len(chosen)]:
        if all(_compatible(view, other) for other in chosen):
            if _pick_compatible(candidates, chosen + [view]):
                return True
    return False
