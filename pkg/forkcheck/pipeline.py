"""Report building: run a property checker on a history and package the verdict.

Flow: history + register spec → checker → Report (→ witness re-validation).
"""

from __future__ import annotations

import logging
from typing import Iterable, Optional

from forkcheck.checkers.explain import explain
from forkcheck.checkers.fork import check_fork_sequential_consistency, verify_fork_views
from forkcheck.checkers.liveness import check_wait_freedom
from forkcheck.checkers.patterns import fork_join_chain
from forkcheck.checkers.sequential import check_sequential_consistency
from forkcheck.errors import HarnessError
from forkcheck.history.operations import complete_ops, preserves_client_order
from forkcheck.history.registers import check_sequential_spec
from forkcheck.models import (
    BudgetUsage,
    History,
    Outcome,
    Property,
    RegisterSpec,
    Report,
    SearchBudget,
)

logger = logging.getLogger(__name__)


def build_report(
    history: History,
    spec: RegisterSpec,
    prop: Property,
    budget: SearchBudget | None = None,
    correct: Optional[Iterable[int]] = None,
    server_correct: bool = True,
) -> Report:
    """Check one property and return its Report.

    Failing reports carry the counterexample walk; passing SC and FSC reports
    carry the witness and the events the chosen extension appended.
    """
    budget = budget or SearchBudget.from_settings()
    if prop is Property.EMULATION:
        return check_emulation(history, spec, server_correct, budget, correct)

    if prop is Property.SC:
        sc = check_sequential_consistency(history, spec, budget)
        report = Report(
            property=prop,
            outcome=sc.outcome,
            witness=sc.witness,
            counterexample=sc.reason,
            appended=sc.extension.appended if sc.extension else (),
            budget_used=sc.budget_used,
        )
    elif prop is Property.FSC:
        fsc = check_fork_sequential_consistency(history, spec, budget)
        report = Report(
            property=prop,
            outcome=fsc.outcome,
            views=fsc.views,
            counterexample=fsc.reason,
            appended=fsc.extension.appended if fsc.extension else (),
            budget_used=fsc.budget_used,
        )
        if fsc.outcome is Outcome.FAIL:
            chain = fork_join_chain(history)
            if chain is not None:
                report = report.model_copy(update={"counterexample": chain})
    else:
        wf = check_wait_freedom(history, correct)
        _, walk = explain(history, spec, prop, budget, correct)
        report = Report(
            property=prop,
            outcome=wf.outcome,
            counterexample=walk,
            pending=wf.pending.label if wf.pending else None,
        )

    problem = verify_report(report, history, spec)
    if problem is not None:
        logger.error("witness for %s does not re-validate: %s", prop.value, problem)
        raise HarnessError(f"{prop.value} witness does not re-validate: {problem}")
    return report


def verify_report(report: Report, history: History, spec: RegisterSpec) -> str | None:
    """Re-check a passing witness with the order and register predicates.

    π must hold every operation of complete(σ′) exactly once; fork views are
    checked against σ and the extension's appended responses.
    """
    if report.outcome is not Outcome.PASS:
        return None
    if report.witness is not None:
        extended = History(events=history.events + report.appended)
        expected = {op.op_id: op for op in complete_ops(extended)}
        ids = report.witness.op_ids
        if len(set(ids)) != len(ids):
            return "witness repeats an operation"
        stray = next((op for op in report.witness.ops if expected.get(op.op_id) != op), None)
        if stray is not None:
            return f"witness holds {stray.label or stray.op_id}, not a complete operation"
        missing = [op for op_id, op in expected.items() if op_id not in set(ids)]
        if missing:
            return f"witness omits {missing[0].label or missing[0].op_id}"
        if not preserves_client_order(report.witness, extended):
            return "witness inverts a client's real-time order"
        violation = check_sequential_spec(report.witness, spec)
        return violation.describe() if violation else None
    if report.views is not None:
        return verify_fork_views(history, report.views, spec, report.appended)
    return None


def check_emulation(
    history: History,
    spec: RegisterSpec,
    server_correct: bool,
    budget: SearchBudget | None = None,
    correct: Optional[Iterable[int]] = None,
) -> Report:
    """Whether *history* is allowed for a fork-sequentially-consistent Byzantine emulation.

    With a correct server the history must be sequentially consistent and
    wait-free; in every case it must be fork-sequentially-consistent.
    """
    budget = budget or SearchBudget.from_settings()
    props = [Property.SC, Property.WF, Property.FSC] if server_correct else [Property.FSC]
    components = [build_report(history, spec, p, budget, correct) for p in props]
    outcomes = [c.outcome for c in components]
    if Outcome.FAIL in outcomes:
        outcome = Outcome.FAIL
    elif Outcome.INCONCLUSIVE in outcomes:
        outcome = Outcome.INCONCLUSIVE
    else:
        outcome = Outcome.PASS
    failing = next((c for c in components if c.outcome is Outcome.FAIL), None)
    return Report(
        property=Property.EMULATION,
        outcome=outcome,
        counterexample=failing.counterexample if failing else None,
        budget_used=BudgetUsage(
            extensions=sum(c.budget_used.extensions for c in components),
            nodes=sum(c.budget_used.nodes for c in components),
        ),
        components=components,
    )
