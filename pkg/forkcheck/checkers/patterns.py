"""The fork-join refutation pattern.

A client C_i that reads a value written by C_j pins C_j's write inside its
view between two of its own reads. No-join then copies C_i's operations up
to that point into C_j's view ahead of the write, and C_j's own real-time
order puts them ahead of every later read of C_j. If such a later read
returns a value those copied writes have already overwritten, no set of fork
views exists. Each link is forced, so a match is a complete refutation.
"""

from __future__ import annotations

from forkcheck.history.operations import complete_ops
from forkcheck.models import (
    Explanation,
    ExplanationStep,
    History,
    Operation,
    Value,
)


def _value_rank(writer_ops: list[Operation], register: str, value: Value) -> int:
    """Position of *value* in the writer's sequence of writes to *register*; ⊥ ranks -1."""
    if value.is_bottom:
        return -1
    rank = 0
    for op in writer_ops:
        if op.is_write and op.reg == register:
            if op.written_value == value:
                return rank
            rank += 1
    return -2


def fork_join_chain(history: History) -> Explanation | None:
    """Find the first fork-join refutation in *history*, or None."""
    ops = complete_ops(history)
    lanes: dict[int, list[Operation]] = {}
    for op in ops:
        lanes.setdefault(op.client, []).append(op)
    writes = {(op.reg, op.written_value): op for op in ops if op.is_write}

    for reader in sorted(lanes):
        lane = lanes[reader]
        for pos, read in enumerate(lane):
            if not read.is_read or read.returned_value is None or read.returned_value.is_bottom:
                continue
            write = writes.get((read.reg, read.returned_value))
            if write is None or write.client == reader:
                continue
            writer_lane = lanes[write.client]
            seen_rank = _value_rank(writer_lane, read.reg, read.returned_value)
            earlier = [
                r for r in lane[:pos]
                if r.is_read and r.reg == read.reg and r.returned_value is not None
                and -1 <= _value_rank(writer_lane, r.reg, r.returned_value) < seen_rank
            ]
            if not earlier:
                continue
            boundary = earlier[-1]
            forced = lane[: lane.index(boundary) + 1]
            chain = _stale_read_after(
                read, write, boundary, forced, lane, writer_lane
            )
            if chain is not None:
                return chain
    return None


def _stale_read_after(
    read: Operation,
    write: Operation,
    boundary: Operation,
    forced: list[Operation],
    reader_lane: list[Operation],
    writer_lane: list[Operation],
) -> Explanation | None:
    last_write: dict[str, Operation] = {}
    for op in forced:
        if op.is_write:
            last_write[op.reg] = op

    after = writer_lane[writer_lane.index(write) + 1:]
    for later in after:
        if not later.is_read or later.returned_value is None:
            continue
        overwritten = last_write.get(later.reg)
        if overwritten is None or overwritten.written_value == later.returned_value:
            continue
        got_rank = _value_rank(reader_lane, later.reg, later.returned_value)
        newest_rank = _value_rank(reader_lane, later.reg, overwritten.written_value)
        if not -1 <= got_rank < newest_rank:
            continue
        reader, writer = read.client, write.client
        return Explanation(
            summary=f"fork views cannot exist: C{reader} observes {write.label} after "
            f"{overwritten.label}, but C{writer} later reads a value {overwritten.label} overwrote",
            steps=[
                ExplanationStep(
                    condition="2+3",
                    message=f"in the view of C{reader}, {write.label} must come after "
                    f"{boundary.label} (which returns {boundary.returned_value}) and before "
                    f"{read.label} (which returns {read.returned_value})",
                    operations=[boundary.label, write.label, read.label],
                ),
                ExplanationStep(
                    condition="4",
                    message=f"{write.label} is also in the view of C{writer}; by no-join both "
                    f"views share its prefix, so {overwritten.label} precedes {write.label} "
                    f"in the view of C{writer}",
                    operations=[overwritten.label, write.label],
                ),
                ExplanationStep(
                    condition="2",
                    message=f"the real-time order of C{writer} puts {write.label}, and with it "
                    f"{overwritten.label}, before {later.label} in the view of C{writer}",
                    operations=[write.label, later.label],
                ),
                ExplanationStep(
                    condition="3",
                    message=f"{later.label} returns {later.returned_value} from {later.reg}, "
                    f"but {overwritten.label} already wrote {overwritten.written_value}: "
                    "the register specification is violated",
                    operations=[later.label, overwritten.label],
                ),
            ],
        )
    return None
