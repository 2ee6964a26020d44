"""Seeded random workloads for correct-server soundness runs."""

from __future__ import annotations

import random

from forkcheck.models import (
    ClientScript,
    DelayRule,
    EventKind,
    EventRef,
    OpKind,
    OpRequest,
    SchedulerKind,
    ServerKind,
    SimConfig,
)


def random_config(
    seed: int,
    clients: int = 2,
    ops_per_client: int = 3,
    max_delay_rules: int = 2,
    server_kind: ServerKind = ServerKind.CORRECT,
) -> SimConfig:
    """A random-schedule config where C_i writes X_i and reads any register.

    Written values are unique per register, and delay rules hold messages
    until events of other clients, which may never happen.
    """
    rng = random.Random(seed)
    registers = {f"X{c}": c for c in range(1, clients + 1)}
    scripts = []
    for client in range(1, clients + 1):
        ops = []
        writes = 0
        for _ in range(ops_per_client):
            if rng.random() < 0.5:
                writes += 1
                ops.append(OpRequest(op=OpKind.WRITE, reg=f"X{client}",
                                     value=f"v{client}.{writes}"))
            else:
                ops.append(OpRequest(op=OpKind.READ, reg=rng.choice(sorted(registers))))
        scripts.append(ClientScript(client=client, ops=tuple(ops)))

    rules = []
    for _ in range(rng.randint(0, max_delay_rules)):
        if clients < 2 or ops_per_client < 1:
            break
        sender = rng.randint(1, clients)
        other = rng.choice([c for c in range(1, clients + 1) if c != sender])
        rule = DelayRule(
            sender=sender,
            ordinal=rng.randint(1, ops_per_client),
            until=EventRef(
                client=other,
                op_ordinal=rng.randint(1, ops_per_client),
                kind=rng.choice([EventKind.INVOCATION, EventKind.RESPONSE]),
            ),
        )
        if all((r.sender, r.ordinal) != (rule.sender, rule.ordinal) for r in rules):
            rules.append(rule)

    return SimConfig(
        registers=registers,
        client_scripts=tuple(scripts),
        server_kind=server_kind,
        delay_schedule=tuple(rules),
        scheduler=SchedulerKind.RANDOM,
        seed=seed,
        comment=f"random workload, seed {seed}",
    )
