"""Line-oriented trace files: a JSON header line, then one JSON event per line.

⊥ is encoded as JSON ``null`` on a read response. Read invocations and write
responses carry ``null`` as well; their kind says there is no value.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, ValidationError

from forkcheck.errors import MalformedHistoryError, TraceFormatError
from forkcheck.history.operations import ensure_well_formed
from forkcheck.models import (
    BOTTOM,
    Event,
    EventKind,
    History,
    OpKind,
    TraceFile,
    TraceHeader,
    TraceSource,
    Value,
)

logger = logging.getLogger(__name__)

# Event lines start after the header.
_FIRST_EVENT_LINE = 2


class TraceLine(BaseModel):
    """Wire form of one event."""
    model_config = ConfigDict(extra="forbid")

    kind: EventKind
    client: int
    op: OpKind
    reg: str
    value: Optional[str] = None
    label: str = ""

    @classmethod
    def from_event(cls, event: Event) -> TraceLine:
        return cls(
            kind=event.kind,
            client=event.client,
            op=event.op_kind,
            reg=event.reg,
            value=None if event.value is None else event.value.data,
            label=event.label,
        )

    @property
    def carries_value(self) -> bool:
        """Write invocations and read responses carry a value; the other two never do."""
        return (self.op is OpKind.WRITE) == (self.kind is EventKind.INVOCATION)

    def to_event(self, index: int) -> Event:
        value: Value | None = None
        if self.carries_value:
            value = BOTTOM if self.value is None else Value(data=self.value)
        return Event(
            kind=self.kind,
            client=self.client,
            op_kind=self.op,
            reg=self.reg,
            value=value,
            index=index,
            label=self.label,
        )


def emit_trace(
    history: History,
    registers: dict[str, int] | None = None,
    comment: str = "",
    source: TraceSource = TraceSource.EXTERNAL,
) -> str:
    """Serialize *history* to trace text. Equal inputs give byte-identical output."""
    header = TraceHeader(
        registers=registers if registers is not None else {"X1": 1, "X2": 2},
        comment=comment,
        source=source,
    )
    lines = [header.model_dump_json()]
    lines.extend(TraceLine.from_event(e).model_dump_json() for e in history.events)
    return "\n".join(lines) + "\n"


def trace_body(text: str) -> str:
    """The event lines of a trace, without its header."""
    return "".join(text.splitlines(keepends=True)[1:])


def parse_trace(text: str) -> TraceFile:
    """Parse trace text into a well-formed history, or raise TraceFormatError with a line number."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise TraceFormatError(1, "missing header line")
    try:
        header = TraceHeader.model_validate_json(lines[0])
    except ValidationError as exc:
        raise TraceFormatError(1, f"bad header: {_first_error(exc)}") from exc

    events: list[Event] = []
    for number, line in enumerate(lines[1:], start=_FIRST_EVENT_LINE):
        if not line.strip():
            continue
        try:
            wire = TraceLine.model_validate_json(line)
        except ValidationError as exc:
            raise TraceFormatError(number, _first_error(exc)) from exc
        if wire.reg not in header.registers:
            raise TraceFormatError(number, f"register {wire.reg!r} is not declared in the header")
        if wire.op is OpKind.WRITE and wire.kind is EventKind.INVOCATION and wire.value is None:
            raise TraceFormatError(number, "a write cannot store ⊥")
        if not wire.carries_value and wire.value is not None:
            what = "read invocation" if wire.op is OpKind.READ else "write response"
            raise TraceFormatError(number, f"{what} carries a value")
        events.append(wire.to_event(len(events)))

    history = History(events=tuple(events))
    try:
        ensure_well_formed(history)
    except MalformedHistoryError as exc:
        raise TraceFormatError(
            _line_of(lines, exc.violation.index), exc.violation.rule
        ) from exc
    logger.debug("parsed %d events (%s)", len(events), header.source.value)
    return TraceFile(header=header, history=history)


def _line_of(lines: list[str], event_index: int) -> int:
    seen = -1
    for number, line in enumerate(lines[1:], start=_FIRST_EVENT_LINE):
        if line.strip():
            seen += 1
            if seen == event_index:
                return number
    return len(lines)


def _first_error(exc: ValidationError) -> str:
    err = exc.errors()[0]
    where = ".".join(str(p) for p in err.get("loc", ())) or "line"
    return f"{where}: {err.get('msg', 'invalid')}"


def read_trace(path: str | Path) -> TraceFile:
    return parse_trace(Path(path).read_text(encoding="utf-8"))


def write_trace(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
