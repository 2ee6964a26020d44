"""Shared Pydantic data models for forkcheck."""

from __future__ import annotations

from enum import Enum
from functools import cached_property
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from forkcheck.config import get_settings


# --- Enums ---

class EventKind(str, Enum):
    """Whether an event starts or ends an operation."""
    INVOCATION = "inv"
    RESPONSE = "res"


class OpKind(str, Enum):
    """The two register operations."""
    READ = "read"
    WRITE = "write"


class Outcome(str, Enum):
    """Checker outcome. Inconclusive is never coerced to pass or fail."""
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class SpecViolationKind(str, Enum):
    STALE_READ = "stale-read"
    UNKNOWN_VALUE = "unknown-value"
    DUPLICATE_WRITE = "duplicate-write"
    WRONG_WRITER = "wrong-writer"


class Property(str, Enum):
    """Properties the command line can check."""
    SC = "sc"
    FSC = "fsc"
    WF = "wf"
    EMULATION = "emulation"


class TraceSource(str, Enum):
    GENERATED = "generated"
    SIMULATED = "simulated"
    EXTERNAL = "external"


# --- Values, events, operations ---

class Value(BaseModel):
    """A register value: either the initial value ⊥ (``data is None``) or opaque data."""
    model_config = ConfigDict(frozen=True)

    data: Optional[str] = None

    @property
    def is_bottom(self) -> bool:
        return self.data is None

    def __str__(self) -> str:
        return "⊥" if self.data is None else self.data


BOTTOM = Value()


def data(text: str) -> Value:
    """Shorthand for a non-⊥ value."""
    return Value(data=text)


class RegisterId(BaseModel):
    """A SWMR register and its designated writer."""
    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1)
    writer: int = Field(ge=1)


class Event(BaseModel):
    """One invocation or response at a client.

    ``value`` is the write payload on a write invocation and the returned
    value on a read response; it is ``None`` on read invocations and write
    responses.
    """
    model_config = ConfigDict(frozen=True)

    kind: EventKind
    client: int = Field(ge=1)
    op_kind: OpKind
    reg: str
    value: Optional[Value] = None
    index: int = Field(ge=0)
    label: str = ""


class Operation(BaseModel):
    """An invocation paired with its response, if any.

    Identity is ``(client, inv_index)``; labels are display metadata only.
    """
    model_config = ConfigDict(frozen=True)

    client: int = Field(ge=1)
    op_kind: OpKind
    reg: str
    written_value: Optional[Value] = None
    returned_value: Optional[Value] = None
    inv_index: int = Field(ge=0)
    res_index: Optional[int] = None
    label: str = ""

    @property
    def op_id(self) -> tuple[int, int]:
        return (self.client, self.inv_index)

    @property
    def is_complete(self) -> bool:
        return self.res_index is not None

    @property
    def is_write(self) -> bool:
        return self.op_kind is OpKind.WRITE

    @property
    def is_read(self) -> bool:
        return self.op_kind is OpKind.READ

    def describe(self) -> str:
        """Human-readable form, e.g. ``w_2^3 write(X2, v3)`` or ``r_1^1 read(X2)→v2``."""
        if self.is_write:
            body = f"write({self.reg}, {self.written_value})"
        elif self.returned_value is None:
            body = f"read({self.reg})→?"
        else:
            body = f"read({self.reg})→{self.returned_value}"
        return f"{self.label} {body}" if self.label else body


class History(BaseModel):
    """A finite sequence of events: the houses of σ and σ′."""
    model_config = ConfigDict(frozen=True)

    events: tuple[Event, ...] = ()

    @cached_property
    def operations(self) -> tuple[Operation, ...]:
        """Operations in invocation order. Assumes per-client alternation."""
        pending: dict[int, Event] = {}
        built: dict[int, Operation] = {}
        for event in self.events:
            if event.kind is EventKind.INVOCATION:
                pending[event.client] = event
                built[event.index] = _operation_from(event)
                continue
            inv = pending.pop(event.client, None)
            if inv is None:
                continue
            op = built[inv.index]
            returned = event.value if op.is_read else None
            built[inv.index] = op.model_copy(
                update={"res_index": event.index, "returned_value": returned}
            )
        return tuple(built[i] for i in sorted(built))

    @cached_property
    def clients(self) -> tuple[int, ...]:
        return tuple(sorted({e.client for e in self.events}))

    def by_client(self, client: int) -> tuple[Operation, ...]:
        return tuple(op for op in self.operations if op.client == client)

    def operation(self, op_id: tuple[int, int]) -> Operation:
        for op in self.operations:
            if op.op_id == op_id:
                return op
        raise KeyError(f"no operation {op_id} in history")

    def __len__(self) -> int:
        return len(self.events)


def _operation_from(event: Event) -> Operation:
    return Operation(
        client=event.client,
        op_kind=event.op_kind,
        reg=event.reg,
        written_value=event.value if event.op_kind is OpKind.WRITE else None,
        inv_index=event.index,
        label=event.label,
    )


class View(BaseModel):
    """A sequential permutation of complete operations.

    ``owner`` is the client a fork view belongs to; a sequential-consistency
    witness π belongs to no single client and has no owner.
    """
    model_config = ConfigDict(frozen=True)

    owner: Optional[int] = Field(default=None, ge=1)
    ops: tuple[Operation, ...] = ()

    @property
    def op_ids(self) -> tuple[tuple[int, int], ...]:
        return tuple(op.op_id for op in self.ops)

    def __contains__(self, op: object) -> bool:
        return isinstance(op, Operation) and op.op_id in set(self.op_ids)

    def __len__(self) -> int:
        return len(self.ops)

    def labels(self) -> list[str]:
        return [op.label or f"{op.op_kind.value}@{op.inv_index}" for op in self.ops]


# --- Register specification ---

class RegisterSpec(BaseModel):
    """The registers of a system and their designated writers."""
    model_config = ConfigDict(frozen=True)

    registers: tuple[RegisterId, ...] = ()

    @classmethod
    def from_writers(cls, writers: dict[str, int]) -> RegisterSpec:
        return cls(
            registers=tuple(RegisterId(name=n, writer=w) for n, w in sorted(writers.items()))
        )

    @classmethod
    def default(cls, clients: int = 2) -> RegisterSpec:
        """C_i writes X_i."""
        return cls.from_writers({f"X{i}": i for i in range(1, clients + 1)})

    @property
    def writers(self) -> dict[str, int]:
        return {r.name: r.writer for r in self.registers}

    def writer_of(self, register: str) -> Optional[int]:
        return self.writers.get(register)


class SpecViolation(BaseModel):
    """A breach of the SWMR register specification, with counterexample context."""
    model_config = ConfigDict(frozen=True)

    kind: SpecViolationKind
    at: Operation
    expected: Optional[Value] = None
    got: Optional[Value] = None

    def describe(self) -> str:
        if self.kind is SpecViolationKind.STALE_READ:
            return f"{self.at.describe()} is stale: the latest preceding write left {self.expected}"
        if self.kind is SpecViolationKind.UNKNOWN_VALUE:
            return f"{self.at.describe()} returns {self.got}, which is never written to {self.at.reg}"
        if self.kind is SpecViolationKind.DUPLICATE_WRITE:
            return f"{self.at.describe()} writes {self.got} a second time"
        return f"{self.at.describe()} is issued by C{self.at.client}, not the register's writer"


class WellFormednessViolation(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    rule: str

    def describe(self) -> str:
        return f"event {self.index}: {self.rule}"


# --- Checker inputs and verdicts ---

class SearchBudget(BaseModel):
    """Limits on the witness search."""
    model_config = ConfigDict(frozen=True)

    max_ops: int = Field(gt=0, default=64)
    max_extensions: int = Field(gt=0, default=4096)
    max_nodes: int = Field(gt=0, default=2_000_000)

    @classmethod
    def from_settings(cls) -> SearchBudget:
        settings = get_settings()
        return cls(
            max_ops=settings.max_ops,
            max_extensions=settings.max_extensions,
            max_nodes=settings.max_nodes,
        )


class Extension(BaseModel):
    """A history extended by responses that complete some pending operations."""
    model_config = ConfigDict(frozen=True)

    base: History
    appended: tuple[Event, ...] = ()

    @cached_property
    def history(self) -> History:
        return History(events=self.base.events + self.appended)

    @cached_property
    def completed_ids(self) -> frozenset[tuple[int, int]]:
        """Operations completed by the appended responses."""
        ext = self.history
        return frozenset(
            op.op_id for op in ext.operations
            if op.res_index is not None and op.res_index >= len(self.base.events)
        )


class ExplanationStep(BaseModel):
    """One link of a refutation chain."""
    condition: str
    message: str
    operations: list[str] = Field(default_factory=list)


class Explanation(BaseModel):
    summary: str
    steps: list[ExplanationStep] = Field(default_factory=list)


class BudgetUsage(BaseModel):
    extensions: int = 0
    nodes: int = 0


class ScVerdict(BaseModel):
    outcome: Outcome
    witness: Optional[View] = None
    extension: Optional[Extension] = None
    reason: Optional[Explanation] = None
    budget_used: BudgetUsage = Field(default_factory=BudgetUsage)


class FscVerdict(BaseModel):
    outcome: Outcome
    views: Optional[dict[int, View]] = None
    extension: Optional[Extension] = None
    reason: Optional[Explanation] = None
    budget_used: BudgetUsage = Field(default_factory=BudgetUsage)


class WfVerdict(BaseModel):
    outcome: Outcome
    pending: Optional[Operation] = None


# --- Scenarios ---

class ScenarioParams(BaseModel):
    """Parameters of the α/β/γ construction."""
    model_config = ConfigDict(frozen=True)

    z: int = Field(default=4, description="Index of C2's first non-⊥ read of X1; at least 4")
    l: int = Field(default=1, description="Index of C1's read returning v_{z-2}")
    writer_value: str = "u"
    value_prefix: str = "v"

    def value(self, i: int) -> str:
        return f"{self.value_prefix}{i}"

    @property
    def write_phases(self) -> int:
        """Request rounds of C1's write needed to push C2's first non-⊥ read to index z."""
        return self.z - 3


def op_label(op_kind: OpKind, client: int, ordinal: int) -> str:
    """Display label for a client's ordinal-th operation of a kind, e.g. ``w_2^3``."""
    prefix = "w" if op_kind is OpKind.WRITE else "r"
    return f"{prefix}_{client}^{ordinal}"


# --- Simulation ---

class ServerKind(str, Enum):
    CORRECT = "correct"
    FORKING = "forking"


class SchedulerKind(str, Enum):
    """How the simulator picks the next step among enabled ones."""
    ROUND_ROBIN = "round_robin"
    RANDOM = "random"


class HaltReason(str, Enum):
    COMPLETED = "completed"
    STEP_LIMIT = "step-limit"


class OpRequest(BaseModel):
    """One scripted operation. In a repeat pattern ``value`` may hold ``{i}``."""
    model_config = ConfigDict(frozen=True)

    op: OpKind
    reg: str
    value: Optional[str] = None

    @model_validator(mode="after")
    def _value_matches_kind(self) -> OpRequest:
        if self.op is OpKind.WRITE and self.value is None:
            raise ValueError(f"write to {self.reg} needs a value")
        if self.op is OpKind.READ and self.value is not None:
            raise ValueError(f"read of {self.reg} carries a value")
        return self


class EventRef(BaseModel):
    """A client's op_ordinal-th operation (counted from 1) and which of its events."""
    model_config = ConfigDict(frozen=True)

    client: int = Field(ge=1)
    op_ordinal: int = Field(ge=1)
    kind: EventKind = EventKind.RESPONSE


class RepeatRule(BaseModel):
    """Run *pattern* for rounds i = start_index, start_index + 1, ...

    Stops as soon as a read of ``until_register`` returns ``until_value``
    (any non-⊥ value when ``until_value`` is None), or after ``max_rounds``.
    """
    model_config = ConfigDict(frozen=True)

    pattern: tuple[OpRequest, ...] = Field(min_length=1)
    start_index: int = 1
    until_register: Optional[str] = None
    until_value: Optional[str] = None
    max_rounds: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _terminates(self) -> RepeatRule:
        if self.until_register is None and self.max_rounds is None:
            raise ValueError("repeat rule needs until_register or max_rounds")
        return self


class ClientScript(BaseModel):
    model_config = ConfigDict(frozen=True)

    client: int = Field(ge=1)
    start_after: Optional[EventRef] = None
    ops: tuple[OpRequest, ...] = ()
    repeat: Optional[RepeatRule] = None

    def requests(self) -> list[OpRequest]:
        """Every request the script could issue (templates unexpanded)."""
        return list(self.ops) + list(self.repeat.pattern if self.repeat else ())


class DelayRule(BaseModel):
    """Hold the sender's ordinal-th message to the server until *until* occurs."""
    model_config = ConfigDict(frozen=True)

    sender: int = Field(ge=1)
    ordinal: int = Field(ge=1)
    until: EventRef


class SimConfig(BaseModel):
    """Everything a simulation run depends on; equal configs give equal results."""
    model_config = ConfigDict(frozen=True)

    registers: dict[str, int] = Field(default_factory=lambda: {"X1": 1, "X2": 2})
    client_scripts: tuple[ClientScript, ...] = ()
    server_kind: ServerKind = ServerKind.CORRECT
    fork_z: Optional[int] = None
    write_phases: int = Field(default=1, ge=1)
    delay_schedule: tuple[DelayRule, ...] = ()
    scheduler: SchedulerKind = SchedulerKind.ROUND_ROBIN
    seed: int = 0
    max_steps: int = Field(default=10_000, ge=0)
    comment: str = ""

    @model_validator(mode="after")
    def _scripts_fit_registers(self) -> SimConfig:
        clients = [s.client for s in self.client_scripts]
        if len(clients) != len(set(clients)):
            raise ValueError("more than one script for a client")
        for script in self.client_scripts:
            for req in script.requests():
                if req.reg not in self.registers:
                    raise ValueError(f"C{script.client} uses undeclared register {req.reg}")
                if req.op is OpKind.WRITE and self.registers[req.reg] != script.client:
                    raise ValueError(
                        f"C{script.client} writes {req.reg}, "
                        f"whose writer is C{self.registers[req.reg]}"
                    )
        if self.server_kind is ServerKind.FORKING and (self.fork_z is None or self.fork_z < 4):
            raise ValueError("a forking server needs fork_z >= 4")
        return self

    @property
    def register_spec(self) -> RegisterSpec:
        return RegisterSpec.from_writers(self.registers)


class Payload(BaseModel):
    """Protocol record: one request per round, one reply per request."""
    model_config = ConfigDict(frozen=True)

    reply: bool = False
    client: int
    op_kind: OpKind
    reg: str
    value: Optional[Value] = None
    phase: int = 1
    phases: int = 1


class Message(BaseModel):
    model_config = ConfigDict(frozen=True)

    seq: int
    sender: str
    receiver: str
    payload: Payload
    send_step: int


class DeliveredMessage(BaseModel):
    message: Message
    deliver_step: int
    dangling: bool = False


class SimResult(BaseModel):
    history: History
    delivered: list[DeliveredMessage] = Field(default_factory=list)
    halted_reason: HaltReason
    dangling: list[DelayRule] = Field(default_factory=list)
    steps: int = 0
    unstarted: list[int] = Field(default_factory=list)


# --- Trace files and reports ---

class TraceHeader(BaseModel):
    """First line of a trace file."""
    model_config = ConfigDict(frozen=True)

    registers: dict[str, int] = Field(default_factory=lambda: {"X1": 1, "X2": 2})
    comment: str = ""
    source: TraceSource = TraceSource.EXTERNAL

    @property
    def register_spec(self) -> RegisterSpec:
        return RegisterSpec.from_writers(self.registers)


class TraceFile(BaseModel):
    model_config = ConfigDict(frozen=True)

    header: TraceHeader = Field(default_factory=TraceHeader)
    history: History = Field(default_factory=History)


class Report(BaseModel):
    """Verdict of one property on one trace, in replayable form."""
    property: Property
    outcome: Outcome
    witness: Optional[View] = None
    views: Optional[dict[int, View]] = None
    counterexample: Optional[Explanation] = None
    pending: Optional[str] = None
    appended: tuple[Event, ...] = ()
    budget_used: BudgetUsage = Field(default_factory=BudgetUsage)
    components: list[Report] = Field(default_factory=list)
