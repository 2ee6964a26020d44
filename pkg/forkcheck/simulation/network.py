"""Asynchronous reliable FIFO channels with scheduled delays.

Every ordered pair of parties has its own queue. A delay rule holds one
client-to-server message until a named event happens; a held message also
holds everything queued behind it on the same channel, so delays shift
delivery time but never reorder a channel.
"""

from __future__ import annotations

import logging
from collections import deque

from forkcheck.models import DelayRule, DeliveredMessage, EventRef, Message, Payload

logger = logging.getLogger(__name__)

SERVER = "S"


def party(client: int) -> str:
    return f"C{client}"


def delay_rule(sender: int, ordinal: int, until: EventRef) -> DelayRule:
    """Hold C<sender>'s ordinal-th message to the server until *until* occurs."""
    return DelayRule(sender=sender, ordinal=ordinal, until=until)


class Network:
    """FIFO channels between clients and the server, honoring delay rules."""

    def __init__(self, rules: tuple[DelayRule, ...] = ()):
        self._rules = {(r.sender, r.ordinal): r for r in rules}
        self._channels: dict[tuple[str, str], deque[Message]] = {}
        self._held: dict[int, DelayRule] = {}
        self._sent_to_server: dict[int, int] = {}
        self._seq = 0
        self._flushed: set[int] = set()
        self._seen: set[EventRef] = set()
        self.dangling: list[DelayRule] = []
        self.log: list[DeliveredMessage] = []

    def send(self, sender: str, receiver: str, payload: Payload, step: int) -> Message:
        self._seq += 1
        message = Message(
            seq=self._seq, sender=sender, receiver=receiver, payload=payload, send_step=step
        )
        self._channels.setdefault((sender, receiver), deque()).append(message)
        if receiver == SERVER:
            client = payload.client
            ordinal = self._sent_to_server.get(client, 0) + 1
            self._sent_to_server[client] = ordinal
            rule = self._rules.get((client, ordinal))
            if rule is not None and rule.until in self._seen:
                logger.debug("%s message #%d sent after %s; not held", sender, ordinal, rule.until)
            elif rule is not None:
                self._held[message.seq] = rule
                logger.debug("holding %s message #%d until %s", sender, ordinal, rule.until)
        return message

    def deliverable(self) -> list[Message]:
        """Channel heads that are not held, oldest first."""
        heads = [
            queue[0] for queue in self._channels.values()
            if queue and queue[0].seq not in self._held
        ]
        return sorted(heads, key=lambda m: m.seq)

    def deliver(self, message: Message, step: int) -> Message:
        queue = self._channels[(message.sender, message.receiver)]
        if not queue or queue[0].seq != message.seq:
            raise RuntimeError(f"message {message.seq} is not at the head of its channel")
        queue.popleft()
        self.log.append(DeliveredMessage(
            message=message, deliver_step=step, dangling=message.seq in self._flushed
        ))
        return message

    def on_event(self, ref: EventRef) -> None:
        """Release every message held until *ref*."""
        self._seen.add(ref)
        for seq, rule in list(self._held.items()):
            if rule.until == ref:
                del self._held[seq]
                logger.debug("releasing message %d after %s", seq, ref)

    @property
    def has_held(self) -> bool:
        return bool(self._held)

    def flush(self) -> None:
        """Release held messages whose event can no longer happen; flag their rules."""
        for seq, rule in sorted(self._held.items()):
            logger.info("delay rule for C%d message #%d never fired", rule.sender, rule.ordinal)
            self._flushed.add(seq)
            self.dangling.append(rule)
        self._held.clear()

    def still_held(self) -> list[DelayRule]:
        return [rule for _, rule in sorted(self._held.items())]
