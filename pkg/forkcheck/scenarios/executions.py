"""Trace-level generators for the executions α, β and γ of the impossibility construction.

Two clients share SWMR registers X1 (written by C1) and X2 (written by C2).
C2 alternates writes v_1, v_2, ... to X2 with reads of X1; C1 writes u to X1
once, after C2's second read. The timing of C1's write response is pinned to
the request/reply protocol the simulator runs: each of C1's ``z - 3``
request rounds is held back across one write/read pair of C2, so C2's first
read returning u is its z-th.

* α: correct server; C2 runs until r_2^z returns u.
* β: correct server; C2 stops after r_2^{z-2}; C1 then reads X2 and gets v_{z-2}.
* γ: forking server; C2 sees α and C1 sees β from t0 (invocation of w_2^{z-1}) on.
"""

from __future__ import annotations

from forkcheck.errors import ScenarioError
from forkcheck.history.recorder import HistoryRecorder
from forkcheck.models import (
    BOTTOM,
    EventKind,
    History,
    OpKind,
    ScenarioParams,
    data,
    op_label,
)

TIMING_ASSUMPTION = (
    "w_1^1 is invoked after r_2^2 completes and responds after r_2^{z-1} completes: "
    "each of its z-3 request rounds is delayed across one write/read pair of C2"
)


def validate_params(params: ScenarioParams) -> ScenarioParams:
    """Reject parameter combinations the construction cannot realize."""
    if params.z < 4:
        raise ScenarioError(
            f"z={params.z}: z must be at least 4, since r_2^1, r_2^2 and r_2^3 return ⊥"
        )
    if params.l != 1:
        raise ScenarioError(
            f"l={params.l}: once w_1^1 completes the correct server already holds "
            "v_{z-2} in X2, so C1's first read returns it and l must be 1"
        )
    return params


def _common_prefix(rec: HistoryRecorder, params: ScenarioParams, last_pair: int) -> None:
    """C2's write/read pairs 1..last_pair, with C1's write invoked after pair 2."""
    u_not_yet = BOTTOM
    for i in range(1, last_pair + 1):
        rec.write(2, "X2", data(params.value(i)))
        rec.read(2, "X1", u_not_yet)
        if i == 2:
            rec.invoke(1, OpKind.WRITE, "X1", data(params.writer_value))


def generate_alpha(params: ScenarioParams) -> History:
    """Execution α: correct server, C2 reads until X1 yields u at r_2^z."""
    validate_params(params)
    rec = HistoryRecorder()
    _common_prefix(rec, params, params.z - 1)
    rec.respond(1)
    rec.write(2, "X2", data(params.value(params.z)))
    rec.read(2, "X1", data(params.writer_value))
    return rec.history()


def generate_beta(params: ScenarioParams) -> History:
    """Execution β: α through r_2^{z-2}, C2 halts, C1 completes w_1 and reads v_{z-2}."""
    validate_params(params)
    rec = HistoryRecorder()
    _common_prefix(rec, params, params.z - 2)
    rec.respond(1)
    for _ in range(params.l):
        rec.read(1, "X2", data(params.value(params.z - 2)))
    return rec.history()


def generate_gamma(params: ScenarioParams) -> History:
    """Execution γ: the forking server shows α to C2 and β to C1."""
    validate_params(params)
    rec = HistoryRecorder()
    _common_prefix(rec, params, params.z - 1)
    rec.respond(1)
    for _ in range(params.l):
        rec.read(1, "X2", data(params.value(params.z - 2)))
    rec.write(2, "X2", data(params.value(params.z)))
    rec.read(2, "X1", data(params.writer_value))
    return rec.history()


def divergence_point(history: History, params: ScenarioParams) -> int:
    """t0: the event index where w_2^{z-1} is invoked."""
    label = op_label(OpKind.WRITE, 2, params.z - 1)
    for event in history.events:
        if event.kind is EventKind.INVOCATION and event.label == label:
            return event.index
    raise ScenarioError(f"{label} is not invoked in this history")


GENERATORS = {
    "alpha": generate_alpha,
    "beta": generate_beta,
    "gamma": generate_gamma,
}
