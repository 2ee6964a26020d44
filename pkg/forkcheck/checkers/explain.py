"""Counterexample walks for failed properties."""

from __future__ import annotations

import logging
from typing import Iterable, Optional

from forkcheck.checkers.fork import check_fork_sequential_consistency
from forkcheck.checkers.liveness import check_wait_freedom
from forkcheck.checkers.patterns import fork_join_chain
from forkcheck.checkers.sequential import check_sequential_consistency
from forkcheck.models import (
    Explanation,
    ExplanationStep,
    History,
    Outcome,
    Property,
    RegisterSpec,
    SearchBudget,
)

logger = logging.getLogger(__name__)


def explain(
    history: History,
    spec: RegisterSpec,
    prop: Property,
    budget: SearchBudget | None = None,
    correct: Optional[Iterable[int]] = None,
) -> tuple[Outcome, Explanation | None]:
    """Return the property's outcome and, unless it passes, the refutation chain."""
    if prop is Property.SC:
        verdict = check_sequential_consistency(history, spec, budget)
        return verdict.outcome, None if verdict.outcome is Outcome.PASS else verdict.reason

    if prop is Property.FSC:
        verdict = check_fork_sequential_consistency(history, spec, budget)
        if verdict.outcome is not Outcome.FAIL:
            return verdict.outcome, None if verdict.outcome is Outcome.PASS else verdict.reason
        chain = fork_join_chain(history)
        if chain is None:
            logger.debug("no fork-join pattern; falling back to the checker's reason")
        return verdict.outcome, chain or verdict.reason

    if prop is Property.WF:
        wf = check_wait_freedom(history, correct)
        if wf.outcome is Outcome.PASS or wf.pending is None:
            return wf.outcome, None
        op = wf.pending
        return wf.outcome, Explanation(
            summary=f"C{op.client} is correct but its operation never completes",
            steps=[ExplanationStep(
                condition="wait-free",
                message=f"{op.describe()} has no response",
                operations=[op.label],
            )],
        )

    raise ValueError(f"no counterexample walk for property {prop.value!r}")
