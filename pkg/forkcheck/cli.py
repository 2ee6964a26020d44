"""Command-line front end: check, generate, simulate, explain.

Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 malformed input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from forkcheck.checkers.explain import explain
from forkcheck.config import get_settings
from forkcheck.errors import ForkcheckError, HarnessError, ScenarioError
from forkcheck.models import (
    Explanation,
    Outcome,
    Property,
    Report,
    ScenarioParams,
    SearchBudget,
    SimConfig,
    TraceSource,
)
from forkcheck.pipeline import build_report
from forkcheck.scenarios.executions import GENERATORS, TIMING_ASSUMPTION, validate_params
from forkcheck.simulation.scheduler import run_simulation
from forkcheck.trace import emit_trace, read_trace, write_trace

logger = logging.getLogger(__name__)

EXIT_CODES = {Outcome.PASS: 0, Outcome.FAIL: 1, Outcome.INCONCLUSIVE: 2}
EXIT_MALFORMED = 3


def _client_list(text: str) -> list[int]:
    try:
        clients = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated client ids, got {text!r}")
    if any(c < 1 for c in clients):
        raise argparse.ArgumentTypeError("client ids start at 1")
    return clients


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Machine-readable output")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--max-ops", type=int, help="Give up on histories with more operations")
    budget.add_argument("--max-extensions", type=int, help="Extensions to try before giving up")
    budget.add_argument("--max-nodes", type=int, help="Search nodes to expand before giving up")

    parser = argparse.ArgumentParser(
        prog="forkcheck",
        description="forkcheck: decide sequential and fork-sequential consistency of register traces",
    )
    sub = parser.add_subparsers(dest="command")

    # --- check command ---
    check_p = sub.add_parser("check", parents=[common, budget], help="Check a property of a trace")
    check_p.add_argument("trace", help="Trace file")
    check_p.add_argument(
        "--property",
        choices=[p.value for p in Property],
        default=Property.SC.value,
    )
    check_p.add_argument(
        "--correct-clients",
        type=_client_list,
        help="Comma-separated correct clients for wait-freedom (default: all)",
    )
    check_p.add_argument(
        "--server",
        choices=["correct", "byzantine"],
        default="correct",
        help="Server assumption for --property emulation",
    )

    # --- generate command ---
    gen_p = sub.add_parser("generate", parents=[common], help="Write the trace of α, β or γ")
    gen_p.add_argument("scenario", choices=sorted(GENERATORS))
    gen_p.add_argument("--z", type=int, default=None, help="Index of C2's first non-⊥ read (>= 4)")
    gen_p.add_argument("--l", type=int, default=None, help="Index of C1's read returning v_{z-2}")
    gen_p.add_argument("--out", help="Output path (default: stdout)")

    # --- simulate command ---
    sim_p = sub.add_parser("simulate", parents=[common], help="Run a simulator config")
    sim_p.add_argument("config", help="SimConfig JSON file")
    sim_p.add_argument("--out", help="Output path (default: stdout)")

    # --- explain command ---
    exp_p = sub.add_parser("explain", parents=[common, budget], help="Walk a counterexample")
    exp_p.add_argument("trace", help="Trace file")
    exp_p.add_argument(
        "--property",
        choices=[Property.SC.value, Property.FSC.value, Property.WF.value],
        default=Property.FSC.value,
    )
    exp_p.add_argument("--correct-clients", type=_client_list)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(getattr(args, "verbose", False))

    if args.command is None:
        parser.print_help()
        return 1

    try:
        if args.command == "check":
            return _run_check(args)
        if args.command == "generate":
            return _run_generate(args, parser)
        if args.command == "simulate":
            return _run_simulate(args)
        return _run_explain(args)
    except (ForkcheckError, ValidationError) as exc:
        print(f"error: {_one_line(exc)}", file=sys.stderr)
        return EXIT_MALFORMED
    except HarnessError as exc:
        print(f"harness error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


def _configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, get_settings().log_level.upper(), logging.WARNING)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _budget(args) -> SearchBudget:
    base = SearchBudget.from_settings()
    overrides = {
        "max_ops": args.max_ops,
        "max_extensions": args.max_extensions,
        "max_nodes": args.max_nodes,
    }
    merged = base.model_dump()
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return SearchBudget(**merged)


def _run_check(args) -> int:
    trace = read_trace(args.trace)
    report = build_report(
        trace.history,
        trace.header.register_spec,
        Property(args.property),
        budget=_budget(args),
        correct=args.correct_clients,
        server_correct=args.server == "correct",
    )
    if args.json:
        print(report.model_dump_json(indent=2))
    else:
        _print_report(report)
    return EXIT_CODES[report.outcome]


def _run_generate(args, parser: argparse.ArgumentParser) -> int:
    settings = get_settings()
    params = ScenarioParams(
        z=args.z if args.z is not None else settings.default_z,
        l=args.l if args.l is not None else settings.default_l,
    )
    try:
        validate_params(params)
    except ScenarioError as exc:
        parser.error(str(exc))
    history = GENERATORS[args.scenario](params)
    text = emit_trace(
        history,
        comment=f"{args.scenario} z={params.z} l={params.l}; {TIMING_ASSUMPTION}",
        source=TraceSource.GENERATED,
    )
    _emit(text, args.out)
    return 0


def _run_simulate(args) -> int:
    cfg = SimConfig.model_validate_json(Path(args.config).read_text(encoding="utf-8"))
    result = run_simulation(cfg)
    comment = f"halted: {result.halted_reason.value}"
    if cfg.comment:
        comment = f"{cfg.comment}; {comment}"
    if result.dangling:
        comment += f"; {len(result.dangling)} dangling delay rule(s)"
    if result.unstarted:
        comment += "; never started: " + ", ".join(f"C{c}" for c in result.unstarted)
    text = emit_trace(result.history, cfg.registers, comment, TraceSource.SIMULATED)
    _emit(text, args.out)
    if args.json and args.out:
        print(result.model_dump_json(indent=2, exclude={"history"}))
    return 0


def _run_explain(args) -> int:
    trace = read_trace(args.trace)
    outcome, walk = explain(
        trace.history,
        trace.header.register_spec,
        Property(args.property),
        budget=_budget(args),
        correct=args.correct_clients,
    )
    if args.json:
        print(Report(property=Property(args.property), outcome=outcome,
                     counterexample=walk).model_dump_json(indent=2))
    elif outcome is Outcome.PASS:
        print("no counterexample")
    elif walk is None:
        print(f"{args.property}: {outcome.value}, no counterexample walk available")
    else:
        _print_explanation(walk)
    return EXIT_CODES[outcome]


def _emit(text: str, out: str | None) -> None:
    if out:
        path = write_trace(out, text)
        logger.info("wrote %s", path)
    else:
        sys.stdout.write(text)


def _one_line(exc: Exception) -> str:
    if isinstance(exc, ValidationError):
        err = exc.errors()[0]
        where = ".".join(str(p) for p in err.get("loc", ()))
        return f"invalid input at {where or 'top level'}: {err.get('msg')}"
    return str(exc).splitlines()[0]


def _print_report(report: Report, indent: str = "") -> None:
    bar = "=" * 50
    if not indent:
        print(f"\n{bar}")
    print(f"{indent}  Property: {report.property.value}")
    print(f"{indent}  Outcome:  {report.outcome.value.upper()}")
    if report.witness is not None:
        print(f"{indent}  Witness π: {', '.join(report.witness.labels())}")
    if report.views:
        for client, view in report.views.items():
            print(f"{indent}  View of C{client}: {', '.join(view.labels()) or '(empty)'}")
    if report.pending:
        print(f"{indent}  Pending:  {report.pending}")
    if report.budget_used.extensions or report.budget_used.nodes:
        print(f"{indent}  Budget:   {report.budget_used.extensions} extensions, "
              f"{report.budget_used.nodes} nodes")
    for component in report.components:
        print(f"{indent}  {'-' * 46}")
        _print_report(component, indent + "  ")
    if report.counterexample is not None and not report.components:
        _print_explanation(report.counterexample, indent + "  ")
    if not indent:
        print(f"{bar}\n")


def _print_explanation(walk: Explanation, indent: str = "") -> None:
    print(f"{indent}{walk.summary}")
    for number, step in enumerate(walk.steps, start=1):
        ops = f" [{', '.join(step.operations)}]" if step.operations else ""
        print(f"{indent}  {number}. ({step.condition}) {step.message}{ops}")
