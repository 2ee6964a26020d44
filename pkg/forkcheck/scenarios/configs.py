"""Simulator configurations that reproduce α, β and γ under the register protocol."""

from __future__ import annotations

from forkcheck.models import (
    ClientScript,
    EventRef,
    OpKind,
    OpRequest,
    RepeatRule,
    ScenarioParams,
    ServerKind,
    SimConfig,
)
from forkcheck.scenarios.executions import TIMING_ASSUMPTION, validate_params
from forkcheck.simulation.network import delay_rule

# C1 starts once r_2^2 (C2's fourth operation) has completed.
_C1_START = EventRef(client=2, op_ordinal=4)


def _observer_script(params: ScenarioParams, rounds: int | None) -> ClientScript:
    return ClientScript(
        client=2,
        repeat=RepeatRule(
            pattern=(
                OpRequest(op=OpKind.WRITE, reg="X2", value=f"{params.value_prefix}{{i}}"),
                OpRequest(op=OpKind.READ, reg="X1"),
            ),
            until_register="X1",
            max_rounds=rounds,
        ),
    )


def _writer_script(params: ScenarioParams, reads_until_stale: bool) -> ClientScript:
    write = OpRequest(op=OpKind.WRITE, reg="X1", value=params.writer_value)
    repeat = None
    if reads_until_stale:
        repeat = RepeatRule(
            pattern=(OpRequest(op=OpKind.READ, reg="X2"),),
            until_register="X2",
            until_value=params.value(params.z - 2),
            max_rounds=params.l,
        )
    return ClientScript(client=1, start_after=_C1_START, ops=(write,), repeat=repeat)


def _write_delays(params: ScenarioParams, last_read: int):
    """Hold C1's j-th request round until r_2^{2+j} completes, for targets up to *last_read*."""
    rules = []
    for j in range(1, params.write_phases + 1):
        target = 2 + j
        if target <= last_read:
            rules.append(delay_rule(1, j, EventRef(client=2, op_ordinal=2 * target)))
    return tuple(rules)


def alpha_config(params: ScenarioParams) -> SimConfig:
    validate_params(params)
    return SimConfig(
        client_scripts=(_writer_script(params, False), _observer_script(params, None)),
        write_phases=params.write_phases,
        delay_schedule=_write_delays(params, params.z - 1),
        comment=f"alpha z={params.z}; {TIMING_ASSUMPTION}",
    )


def beta_config(params: ScenarioParams) -> SimConfig:
    validate_params(params)
    return SimConfig(
        client_scripts=(_writer_script(params, True), _observer_script(params, params.z - 2)),
        write_phases=params.write_phases,
        delay_schedule=_write_delays(params, params.z - 2),
        comment=f"beta z={params.z} l={params.l}; {TIMING_ASSUMPTION}",
    )


def gamma_config(params: ScenarioParams) -> SimConfig:
    """α's schedule with the forking server and C1 reading X2 after its write."""
    validate_params(params)
    return SimConfig(
        client_scripts=(_writer_script(params, True), _observer_script(params, None)),
        server_kind=ServerKind.FORKING,
        fork_z=params.z,
        write_phases=params.write_phases,
        delay_schedule=_write_delays(params, params.z - 1),
        comment=f"gamma z={params.z} l={params.l}; {TIMING_ASSUMPTION}",
    )


CONFIGS = {
    "alpha": alpha_config,
    "beta": beta_config,
    "gamma": gamma_config,
}
