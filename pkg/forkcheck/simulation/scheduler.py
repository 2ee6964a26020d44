"""Discrete-event scheduler: clients, channels and a server, one step at a time.

Logical time is the step counter. Each step either delivers one message or
invokes one client operation. Deliveries take priority (lowest send sequence
first); otherwise the next ready client in round-robin order invokes, or, under
the random scheduler, a seeded generator picks among all enabled steps.
"""

from __future__ import annotations

import logging
import random
from typing import Optional, Union

from forkcheck.errors import SimulationConfigError
from forkcheck.history.recorder import HistoryRecorder
from forkcheck.models import (
    ClientScript,
    EventKind,
    EventRef,
    HaltReason,
    Message,
    OpKind,
    OpRequest,
    Payload,
    SchedulerKind,
    ServerKind,
    SimConfig,
    SimResult,
    Value,
    data,
)
from forkcheck.simulation.network import SERVER, Network, party
from forkcheck.simulation.servers import Server, correct_server_protocol, forking_server

logger = logging.getLogger(__name__)


class ClientDriver:
    """Runs one client's script: at most one operation in flight."""

    def __init__(self, script: ClientScript, write_phases: int):
        self.client = script.client
        self.script = script
        self.write_phases = write_phases
        self.started = script.start_after is None
        self.ordinal = 0
        self.current: Optional[OpRequest] = None
        self._fixed = 0
        self._round = 0
        self._in_round = 0
        self._stopped = False
        self._from_repeat = False

    @property
    def busy(self) -> bool:
        return self.current is not None

    @property
    def done(self) -> bool:
        return not self.busy and self._peek() is None

    def ready(self) -> bool:
        return self.started and not self.busy and self._peek() is not None

    def _peek(self) -> Optional[OpRequest]:
        if self._fixed < len(self.script.ops):
            return self.script.ops[self._fixed]
        rule = self.script.repeat
        if rule is None or self._stopped:
            return None
        if rule.max_rounds is not None and self._round >= rule.max_rounds:
            return None
        template = rule.pattern[self._in_round]
        if template.value is None:
            return template
        index = rule.start_index + self._round
        return template.model_copy(update={"value": template.value.replace("{i}", str(index))})

    def next_request(self) -> OpRequest:
        request = self._peek()
        if request is None:
            raise RuntimeError(f"C{self.client} has nothing left to invoke")
        self._from_repeat = self._fixed == len(self.script.ops)
        if not self._from_repeat:
            self._fixed += 1
        else:
            self._in_round += 1
            if self._in_round == len(self.script.repeat.pattern):
                self._in_round = 0
                self._round += 1
        self.ordinal += 1
        self.current = request
        return request

    def finish(self, returned: Optional[Value]) -> None:
        request, self.current = self.current, None
        rule = self.script.repeat
        if not (rule and self._from_repeat and request.op is OpKind.READ):
            return
        if request.reg != rule.until_register or returned is None:
            return
        if rule.until_value is None:
            self._stopped = not returned.is_bottom
        else:
            self._stopped = returned.data == rule.until_value


Action = Union[Message, ClientDriver]


class Simulation:
    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.network = Network(cfg.delay_schedule)
        self.server = _build_server(cfg)
        self.drivers = {
            script.client: ClientDriver(script, cfg.write_phases)
            for script in sorted(cfg.client_scripts, key=lambda s: s.client)
        }
        self.order = list(self.drivers)
        self.recorder = HistoryRecorder()
        self.rng = random.Random(cfg.seed)
        self.step = 0
        self._pointer = 0

    def run(self) -> SimResult:
        halted = HaltReason.COMPLETED
        while True:
            action = self._choose()
            if action is None:
                if not self.network.has_held:
                    break
                self.network.flush()
                continue
            if self.step >= self.cfg.max_steps:
                halted = HaltReason.STEP_LIMIT
                break
            self.step += 1
            if isinstance(action, Message):
                self._deliver(action)
            else:
                self._invoke(action)

        dangling = list(self.network.dangling)
        if halted is HaltReason.STEP_LIMIT:
            dangling.extend(self.network.still_held())
        for rule in dangling:
            logger.info("dangling delay rule: C%d message #%d until %s",
                        rule.sender, rule.ordinal, rule.until)
        unstarted = [d.client for d in self.drivers.values() if not d.started and not d.done]
        for client in unstarted:
            logger.info("C%d never started: %s did not occur",
                        client, self.drivers[client].script.start_after)
        logger.info("simulation halted (%s) after %d steps", halted.value, self.step)
        return SimResult(
            history=self.recorder.history(),
            delivered=list(self.network.log),
            halted_reason=halted,
            dangling=dangling,
            steps=self.step,
            unstarted=unstarted,
        )

    def _choose(self) -> Optional[Action]:
        deliverable = self.network.deliverable()
        ready = [self.drivers[c] for c in self.order if self.drivers[c].ready()]
        if self.cfg.scheduler is SchedulerKind.RANDOM:
            enabled: list[Action] = [*deliverable, *ready]
            return self.rng.choice(enabled) if enabled else None
        if deliverable:
            return deliverable[0]
        for offset in range(len(self.order)):
            driver = self.drivers[self.order[(self._pointer + offset) % len(self.order)]]
            if driver.ready():
                return driver
        return None

    def _invoke(self, driver: ClientDriver) -> None:
        request = driver.next_request()
        value = data(request.value) if request.op is OpKind.WRITE else None
        event = self.recorder.invoke(driver.client, request.op, request.reg, value)
        logger.debug("step %d: %s invoked by C%d", self.step, event.label, driver.client)
        self._pointer = (self.order.index(driver.client) + 1) % len(self.order)
        self._occurred(EventRef(client=driver.client, op_ordinal=driver.ordinal,
                                kind=EventKind.INVOCATION))
        phases = driver.write_phases if request.op is OpKind.WRITE else 1
        self._send_request(driver, Payload(
            client=driver.client, op_kind=request.op, reg=request.reg,
            value=value, phase=1, phases=phases,
        ))

    def _send_request(self, driver: ClientDriver, payload: Payload) -> None:
        self.network.send(party(driver.client), SERVER, payload, self.step)

    def _deliver(self, message: Message) -> None:
        self.network.deliver(message, self.step)
        logger.debug("step %d: delivered #%d %s -> %s",
                     self.step, message.seq, message.sender, message.receiver)
        payload = message.payload
        if message.receiver == SERVER:
            for reply in self.server.receive(payload):
                self.network.send(SERVER, party(reply.client), reply, self.step)
            return
        driver = self.drivers[payload.client]
        if payload.op_kind is OpKind.WRITE and payload.phase < payload.phases:
            request = driver.current
            self._send_request(driver, Payload(
                client=driver.client, op_kind=OpKind.WRITE, reg=request.reg,
                value=data(request.value), phase=payload.phase + 1, phases=payload.phases,
            ))
            return
        returned = payload.value if payload.op_kind is OpKind.READ else None
        self.recorder.respond(driver.client, returned)
        driver.finish(returned)
        self._occurred(EventRef(client=driver.client, op_ordinal=driver.ordinal))

    def _occurred(self, ref: EventRef) -> None:
        self.network.on_event(ref)
        for driver in self.drivers.values():
            if not driver.started and driver.script.start_after == ref:
                driver.started = True
                logger.debug("C%d starts after %s", driver.client, ref)


def _build_server(cfg: SimConfig) -> Server:
    if cfg.server_kind is ServerKind.FORKING:
        return forking_server(cfg.fork_z)
    return correct_server_protocol()


def run_simulation(cfg: SimConfig) -> SimResult:
    """Run *cfg* to completion or to its step limit. Equal configs give equal results."""
    for rule in cfg.delay_schedule:
        if rule.sender not in {s.client for s in cfg.client_scripts}:
            raise SimulationConfigError(f"delay rule names C{rule.sender}, which has no script")
    return Simulation(cfg).run()
