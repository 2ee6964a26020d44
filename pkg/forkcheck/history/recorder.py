"""Incremental construction of well-formed histories."""

from __future__ import annotations

from forkcheck.models import Event, EventKind, History, OpKind, Value, op_label


class HistoryRecorder:
    """Appends well-formed events and labels operations per client and kind."""

    def __init__(self) -> None:
        self.events: list[Event] = []
        self._ordinals: dict[tuple[int, OpKind], int] = {}
        self._open: dict[int, Event] = {}

    def invoke(self, client: int, op_kind: OpKind, register: str, value: Value | None = None) -> Event:
        key = (client, op_kind)
        self._ordinals[key] = self._ordinals.get(key, 0) + 1
        event = Event(
            kind=EventKind.INVOCATION,
            client=client,
            op_kind=op_kind,
            reg=register,
            value=value if op_kind is OpKind.WRITE else None,
            index=len(self.events),
            label=op_label(op_kind, client, self._ordinals[key]),
        )
        self.events.append(event)
        self._open[client] = event
        return event

    def respond(self, client: int, value: Value | None = None) -> Event:
        inv = self._open.pop(client)
        event = Event(
            kind=EventKind.RESPONSE,
            client=client,
            op_kind=inv.op_kind,
            reg=inv.reg,
            value=value if inv.op_kind is OpKind.READ else None,
            index=len(self.events),
            label=inv.label,
        )
        self.events.append(event)
        return event

    def write(self, client: int, register: str, value: Value) -> None:
        self.invoke(client, OpKind.WRITE, register, value)
        self.respond(client)

    def read(self, client: int, register: str, returned: Value) -> None:
        self.invoke(client, OpKind.READ, register)
        self.respond(client, returned)

    def history(self) -> History:
        return History(events=tuple(self.events))
