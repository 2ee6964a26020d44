"""Wait-freedom of finite histories."""

from __future__ import annotations

from typing import Iterable, Optional

from forkcheck.history.operations import ensure_well_formed, pending_ops
from forkcheck.models import History, Outcome, WfVerdict


def check_wait_freedom(history: History, correct: Optional[Iterable[int]] = None) -> WfVerdict:
    """Every operation by a correct client is complete.

    *correct* defaults to every client that appears in the history.
    """
    ensure_well_formed(history)
    correct_set = set(history.clients if correct is None else correct)
    for op in pending_ops(history):
        if op.client in correct_set:
            return WfVerdict(outcome=Outcome.FAIL, pending=op)
    return WfVerdict(outcome=Outcome.PASS)
