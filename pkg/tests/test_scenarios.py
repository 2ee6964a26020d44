"""Tests for the α, β and γ generators."""

from __future__ import annotations

import pytest

from forkcheck.checkers.fork import check_fork_sequential_consistency
from forkcheck.checkers.liveness import check_wait_freedom
from forkcheck.checkers.sequential import check_sequential_consistency
from forkcheck.errors import ScenarioError
from forkcheck.history.operations import project_client, validate_well_formed
from forkcheck.history.registers import check_single_writer, check_unique_writes
from forkcheck.models import BOTTOM, Outcome, ScenarioParams, data
from forkcheck.scenarios.executions import (
    GENERATORS,
    divergence_point,
    generate_alpha,
    generate_beta,
    generate_gamma,
    validate_params,
)


class TestParams:
    @pytest.mark.parametrize("z", [0, 1, 2, 3])
    def test_z_below_four(self, z):
        with pytest.raises(ScenarioError, match="at least 4"):
            validate_params(ScenarioParams(z=z))

    @pytest.mark.parametrize("l", [0, 2, 3])
    def test_only_l_one_under_the_protocol(self, l):
        with pytest.raises(ScenarioError):
            validate_params(ScenarioParams(z=4, l=l))

    def test_write_phases(self):
        assert ScenarioParams(z=4).write_phases == 1
        assert ScenarioParams(z=6).write_phases == 3

    def test_generators_validate(self):
        for generate in GENERATORS.values():
            with pytest.raises(ScenarioError):
                generate(ScenarioParams(z=3))


class TestAlpha:
    def test_shape_for_z4(self, alpha):
        ops = alpha.operations
        assert len(ops) == 9
        assert all(op.is_complete for op in ops)
        reads = [op for op in ops if op.client == 2 and op.is_read]
        assert [op.returned_value for op in reads] == [BOTTOM, BOTTOM, BOTTOM, data("u")]

    def test_write_invoked_after_second_read(self, alpha):
        w1 = alpha.operation((1, 8))
        assert w1.label == "w_1^1"
        r_2_2 = next(op for op in alpha.operations if op.label == "r_2^2")
        r_2_3 = next(op for op in alpha.operations if op.label == "r_2^3")
        assert r_2_2.res_index < w1.inv_index < r_2_3.inv_index
        assert r_2_3.res_index < w1.res_index

    @pytest.mark.parametrize("z", [4, 5, 6])
    def test_first_non_bottom_read_is_z(self, z):
        history = generate_alpha(ScenarioParams(z=z))
        reads = [op for op in history.operations if op.client == 2 and op.is_read]
        assert len(reads) == z
        assert all(op.returned_value == BOTTOM for op in reads[:-1])
        assert reads[-1].returned_value == data("u")


class TestBeta:
    def test_shape_for_z4(self, beta):
        assert len(beta.by_client(2)) == 4
        c1 = beta.by_client(1)
        assert [op.label for op in c1] == ["w_1^1", "r_1^1"]
        assert c1[1].returned_value == data("v2")

    @pytest.mark.parametrize("z", [4, 5, 6])
    def test_c2_projection_is_prefix_of_alpha(self, z):
        params = ScenarioParams(z=z)
        beta = project_client(generate_beta(params), 2)
        alpha = project_client(generate_alpha(params), 2)
        assert alpha[: len(beta)] == beta

    @pytest.mark.parametrize("z", [4, 5, 6])
    def test_c1_reads_v_z_minus_2(self, z):
        read = generate_beta(ScenarioParams(z=z)).by_client(1)[-1]
        assert read.returned_value == data(f"v{z - 2}")


class TestGamma:
    @pytest.mark.parametrize("z", [4, 5, 6])
    def test_indistinguishability(self, z):
        params = ScenarioParams(z=z)
        gamma = generate_gamma(params)
        assert project_client(gamma, 2) == project_client(generate_alpha(params), 2)
        assert project_client(gamma, 1) == project_client(generate_beta(params), 1)

    def test_divergence_point(self, gamma, params):
        t0 = divergence_point(gamma, params)
        assert gamma.events[t0].label == "w_2^3"

    def test_divergence_point_missing(self, beta, params):
        with pytest.raises(ScenarioError):
            divergence_point(beta, params)


class TestCorrectServerClause:
    @pytest.mark.parametrize("z", [4, 5, 6])
    def test_alpha_and_beta(self, z, spec):
        params = ScenarioParams(z=z)
        for history in (generate_alpha(params), generate_beta(params)):
            assert validate_well_formed(history) is None
            assert check_unique_writes(history, spec) is None
            assert check_single_writer(history, spec) is None
            assert check_sequential_consistency(history, spec).outcome is Outcome.PASS
            assert check_wait_freedom(history).outcome is Outcome.PASS

    @pytest.mark.parametrize("z", [4, 5, 6])
    def test_gamma_is_not_fork_sequentially_consistent(self, z, spec):
        gamma = generate_gamma(ScenarioParams(z=z))
        assert check_fork_sequential_consistency(gamma, spec).outcome is Outcome.FAIL
