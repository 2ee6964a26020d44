"""Order-theoretic predicates over histories and views.

Every checker builds on these: well-formedness, complete(σ), the real-time
precedence relation, per-client projection and view prefixes π^o.
"""

from __future__ import annotations

from itertools import combinations
from typing import Union

from forkcheck.errors import MalformedHistoryError
from forkcheck.models import (
    Event,
    EventKind,
    History,
    Operation,
    OpKind,
    View,
    WellFormednessViolation,
)


def validate_well_formed(history: History) -> WellFormednessViolation | None:
    """Return the first violation of per-client alternation, or None if well-formed."""
    open_invocations: dict[int, Event] = {}
    for position, event in enumerate(history.events):
        if event.index != position:
            return WellFormednessViolation(
                index=position, rule=f"event index {event.index} does not match position"
            )
        if event.kind is EventKind.INVOCATION:
            if event.client in open_invocations:
                return WellFormednessViolation(
                    index=position,
                    rule=f"C{event.client} invokes while its previous operation is pending",
                )
            if event.op_kind is OpKind.READ and event.value is not None:
                return WellFormednessViolation(index=position, rule="read invocation carries a value")
            if event.op_kind is OpKind.WRITE and event.value is None:
                return WellFormednessViolation(index=position, rule="write invocation carries no value")
            open_invocations[event.client] = event
            continue

        inv = open_invocations.pop(event.client, None)
        if inv is None:
            return WellFormednessViolation(
                index=position, rule=f"response at C{event.client} without a pending invocation"
            )
        if inv.op_kind is not event.op_kind or inv.reg != event.reg:
            return WellFormednessViolation(
                index=position, rule=f"response does not match invocation at event {inv.index}"
            )
        if event.op_kind is OpKind.WRITE and event.value is not None:
            return WellFormednessViolation(index=position, rule="write response carries a value")
        if event.op_kind is OpKind.READ and event.value is None:
            return WellFormednessViolation(index=position, rule="read response carries no value")
    return None


def ensure_well_formed(history: History) -> History:
    """Raise MalformedHistoryError unless *history* is well-formed."""
    violation = validate_well_formed(history)
    if violation is not None:
        raise MalformedHistoryError(violation)
    return history


def complete_ops(history: History) -> tuple[Operation, ...]:
    """complete(σ): the operations that have responses, in invocation order."""
    return tuple(op for op in history.operations if op.is_complete)


def pending_ops(history: History) -> tuple[Operation, ...]:
    return tuple(op for op in history.operations if not op.is_complete)


def precedes(o: Operation, o2: Operation, history: History | None = None) -> bool:
    """o <_σ o2: o completes before o2 is invoked.

    Operations carry their own event positions, so *history* is only
    accepted for symmetry with the other predicates.
    """
    return o.res_index is not None and o.res_index < o2.inv_index


def concurrent(o: Operation, o2: Operation, history: History | None = None) -> bool:
    return o.op_id != o2.op_id and not precedes(o, o2) and not precedes(o2, o)


def is_sequential(history: History) -> bool:
    """True iff no two operations of *history* are concurrent."""
    return not any(concurrent(a, b) for a, b in combinations(history.operations, 2))


def project_client(
    source: Union[View, History], client: int
) -> tuple[Operation, ...] | tuple[Event, ...]:
    """π|C_i: the order-preserving restriction to one client.

    Views project to operations. Histories project to the client's local
    events, indexed by position within the projection, so two executions a
    client cannot tell apart project to equal sequences.
    """
    if isinstance(source, View):
        return tuple(op for op in source.ops if op.client == client)
    local = (e for e in source.events if e.client == client)
    return tuple(e.model_copy(update={"index": i}) for i, e in enumerate(local))


def prefix_through(view: View, o: Operation) -> View:
    """π^o: the prefix of *view* ending with *o*."""
    for position, op in enumerate(view.ops):
        if op.op_id == o.op_id:
            return View(owner=view.owner, ops=view.ops[: position + 1])
    raise ValueError(f"{o.label or o.op_id} is not in the view")


def preserves_real_time(view: View, history: History | None = None) -> bool:
    """True iff no pair in *view* inverts the precedence of the history.

    The positions stored on the operations are the history's positions.
    """
    # No element may complete before an earlier element of the view is invoked.
    latest_inv = -1
    for op in view.ops:
        if op.res_index is not None and op.res_index < latest_inv:
            return False
        latest_inv = max(latest_inv, op.inv_index)
    return True


def preserves_client_order(view: View, history: History | None = None) -> bool:
    """True iff for every client C_j, view|C_j preserves the real-time order."""
    clients = {op.client for op in view.ops}
    for client in clients:
        projected = View(owner=view.owner, ops=project_client(view, client))
        if not preserves_real_time(projected):
            return False
    return True
