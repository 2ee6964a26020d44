"""Server behaviors: the correct register server and the forking attacker."""

from __future__ import annotations

import copy
import logging
from abc import ABC, abstractmethod

from forkcheck.errors import HarnessError
from forkcheck.models import BOTTOM, OpKind, Payload, Value

logger = logging.getLogger(__name__)


class Server(ABC):
    """Consumes one request and returns the replies it triggers."""

    @abstractmethod
    def receive(self, request: Payload) -> list[Payload]:
        ...


class RegisterServer(Server):
    """Correct server of the one-round protocol.

    It holds the register state, applies a write when the write's last
    request round arrives, and answers each request with one reply.
    """

    def __init__(self) -> None:
        self.state: dict[str, Value] = {}

    def receive(self, request: Payload) -> list[Payload]:
        if request.op_kind is OpKind.WRITE:
            if request.phase == request.phases:
                self.state[request.reg] = request.value
            reply_value = None
        else:
            reply_value = self.state.get(request.reg, BOTTOM)
        return [request.model_copy(update={"reply": True, "value": reply_value})]


def correct_server_protocol() -> RegisterServer:
    return RegisterServer()


class ForkingServer(Server):
    """Correct until t0, then shows β to the isolated client and α to the observer.

    t0 is the arrival of the observer's (z-1)-th write. From then on two
    copies of the correct server run side by side: the α copy sees all
    observer traffic plus the isolated client's writes, and answers the
    observer; the β copy never sees the observer's operations after t0, and
    answers the isolated client.
    """

    def __init__(self, z: int, isolated: int = 1, observer: int = 2):
        if z < 4:
            raise ValueError("the forking attack needs z >= 4")
        self.z = z
        self.isolated = isolated
        self.observer = observer
        self._shared = RegisterServer()
        self._alpha: RegisterServer | None = None
        self._beta: RegisterServer | None = None
        self._observer_writes = 0
        self._observer_reads = 0
        self._isolated_writes_in_window = 0

    @property
    def forked(self) -> bool:
        return self._alpha is not None

    def receive(self, request: Payload) -> list[Payload]:
        if request.client == self.observer:
            return self._from_observer(request)
        if not self.forked:
            return self._shared.receive(request)
        if request.op_kind is OpKind.WRITE:
            self._check_window()
            self._alpha.receive(request)
        return self._beta.receive(request)

    def _from_observer(self, request: Payload) -> list[Payload]:
        if request.op_kind is OpKind.WRITE and request.phase == 1:
            self._observer_writes += 1
            if self._observer_writes == self.z - 1 and not self.forked:
                self._alpha = copy.deepcopy(self._shared)
                self._beta = copy.deepcopy(self._shared)
                logger.info("forking at t0: write #%d of C%d", self.z - 1, self.observer)
        elif request.op_kind is OpKind.READ:
            self._observer_reads += 1
        target = self._alpha if self.forked else self._shared
        return target.receive(request)

    def _check_window(self) -> None:
        """In α at most one message of the isolated client reaches the server in [t0, r^z]."""
        if self._observer_reads >= self.z:
            return
        self._isolated_writes_in_window += 1
        if self._isolated_writes_in_window > 1:
            raise HarnessError(
                f"C{self.isolated} sent more than one write message between t0 and the "
                f"completion of C{self.observer}'s read #{self.z}; the run diverged from α"
            )


def forking_server(z: int) -> ForkingServer:
    return ForkingServer(z)
