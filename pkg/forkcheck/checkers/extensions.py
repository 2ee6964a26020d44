"""Extensions σ′ of a history: appending responses to pending operations."""

from __future__ import annotations

import logging
from itertools import combinations, product
from typing import Iterator

from forkcheck.errors import BudgetExceeded
from forkcheck.history.operations import pending_ops
from forkcheck.models import (
    BOTTOM,
    Event,
    EventKind,
    Extension,
    History,
    Operation,
    RegisterSpec,
    SearchBudget,
    Value,
)

logger = logging.getLogger(__name__)


def read_candidates(history: History, register: str) -> list[Value]:
    """⊥ followed by every value written to *register* in *history*, in write order."""
    values = [BOTTOM]
    for op in history.operations:
        if op.is_write and op.reg == register and op.written_value not in values:
            values.append(op.written_value)
    return values


def _responses_for(history: History, op: Operation) -> list[Event]:
    if op.is_write:
        choices: list[Value | None] = [None]
    else:
        choices = list(read_candidates(history, op.reg))
    return [
        Event(
            kind=EventKind.RESPONSE,
            client=op.client,
            op_kind=op.op_kind,
            reg=op.reg,
            value=value,
            index=0,
            label=op.label,
        )
        for value in choices
    ]


def enumerate_extensions(
    history: History,
    spec: RegisterSpec | None = None,
    budget: SearchBudget | None = None,
) -> Iterator[Extension]:
    """Yield every extension, fewest appended responses first.

    Each subset of pending operations is completed; writes with ``ok``, reads
    with ⊥ or a value written to the register somewhere in *history*.

    Raises:
        BudgetExceeded: once more than ``budget.max_extensions`` are requested.
    """
    budget = budget or SearchBudget.from_settings()
    pending = pending_ops(history)
    options = {op.op_id: _responses_for(history, op) for op in pending}
    base_len = len(history.events)
    produced = 0

    for size in range(len(pending) + 1):
        for chosen in combinations(pending, size):
            for responses in product(*(options[op.op_id] for op in chosen)):
                produced += 1
                if produced > budget.max_extensions:
                    raise BudgetExceeded(f"more than {budget.max_extensions} extensions")
                appended = tuple(
                    e.model_copy(update={"index": base_len + i})
                    for i, e in enumerate(responses)
                )
                yield Extension(base=history, appended=appended)
    logger.debug("enumerated %d extensions over %d pending operations", produced, len(pending))


def count_extensions(history: History) -> int:
    """Number of extensions enumerate_extensions yields, without building them."""
    total = 1
    for op in pending_ops(history):
        total *= 1 + (1 if op.is_write else len(read_candidates(history, op.reg)))
    return total
