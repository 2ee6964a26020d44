"""Sequential specification of SWMR read/write registers.

A read returns the value of the most recent preceding write to its register,
or ⊥ when there is none. Values written to a register are unique and only the
register's designated writer may write it.
"""

from __future__ import annotations

from forkcheck.errors import SpecViolationError
from forkcheck.models import (
    BOTTOM,
    History,
    Operation,
    RegisterSpec,
    SpecViolation,
    SpecViolationKind,
    Value,
    View,
)


def check_sequential_spec(view: View, spec: RegisterSpec | None = None) -> SpecViolation | None:
    """Replay *view* against one cell per register; return the first bad read."""
    written: dict[str, set[Value]] = {}
    for op in view.ops:
        if op.is_write and op.written_value is not None:
            written.setdefault(op.reg, set()).add(op.written_value)

    store: dict[str, Value] = {}
    for op in view.ops:
        if op.is_write:
            store[op.reg] = op.written_value or BOTTOM
            continue
        got = op.returned_value
        if got is None:
            continue
        expected = store.get(op.reg, BOTTOM)
        if got == expected:
            continue
        if not got.is_bottom and got not in written.get(op.reg, set()):
            return SpecViolation(
                kind=SpecViolationKind.UNKNOWN_VALUE, at=op, expected=expected, got=got
            )
        return SpecViolation(kind=SpecViolationKind.STALE_READ, at=op, expected=expected, got=got)
    return None


def check_unique_writes(history: History, spec: RegisterSpec | None = None) -> SpecViolation | None:
    """No Data value is written twice to the same register."""
    seen: dict[str, set[Value]] = {}
    for op in history.operations:
        if not op.is_write or op.written_value is None:
            continue
        values = seen.setdefault(op.reg, set())
        if op.written_value in values:
            return SpecViolation(
                kind=SpecViolationKind.DUPLICATE_WRITE, at=op, got=op.written_value
            )
        values.add(op.written_value)
    return None


def check_single_writer(history: History, spec: RegisterSpec) -> SpecViolation | None:
    """Every write to X is issued by writer(X). Anyone may read."""
    for op in history.operations:
        if op.is_write and spec.writer_of(op.reg) != op.client:
            return SpecViolation(kind=SpecViolationKind.WRONG_WRITER, at=op, got=op.written_value)
    return None


def ensure_checkable(history: History, spec: RegisterSpec) -> None:
    """Raise SpecViolationError if the checker preconditions do not hold."""
    violation = check_unique_writes(history, spec) or check_single_writer(history, spec)
    if violation is not None:
        raise SpecViolationError(violation)


def writes_by_value(history: History) -> dict[tuple[str, Value], Operation]:
    """Map (register, value) to the unique write that produced it."""
    return {
        (op.reg, op.written_value): op
        for op in history.operations
        if op.is_write and op.written_value is not None
    }
