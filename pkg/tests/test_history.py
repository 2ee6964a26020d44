"""Tests for the history model and its order predicates."""

from __future__ import annotations

import subprocess
import sys
from itertools import permutations
from pathlib import Path

import pytest
from hypothesis import given, settings

from forkcheck.errors import MalformedHistoryError
from forkcheck.history.recorder import HistoryRecorder
from forkcheck.history.operations import (
    complete_ops,
    concurrent,
    ensure_well_formed,
    is_sequential,
    pending_ops,
    precedes,
    prefix_through,
    preserves_client_order,
    preserves_real_time,
    project_client,
    validate_well_formed,
)
from forkcheck.models import BOTTOM, Event, EventKind, History, OpKind, View, data
from strategies import histories


def _event(kind, client, op_kind, register, value, index):
    return Event(kind=kind, client=client, op_kind=op_kind, reg=register, value=value, index=index)


class TestWellFormedness:
    """Per-client alternation of invocations and responses."""

    def test_generated_histories_are_well_formed(self, alpha, beta, gamma):
        for history in (alpha, beta, gamma):
            assert validate_well_formed(history) is None

    def test_empty_history(self):
        assert validate_well_formed(History()) is None

    def test_response_without_invocation(self):
        history = History(events=(
            _event(EventKind.RESPONSE, 1, OpKind.WRITE, "X1", None, 0),
        ))
        violation = validate_well_formed(history)
        assert violation is not None
        assert violation.index == 0

    def test_second_invocation_while_pending(self):
        history = History(events=(
            _event(EventKind.INVOCATION, 1, OpKind.WRITE, "X1", data("a"), 0),
            _event(EventKind.INVOCATION, 1, OpKind.READ, "X2", None, 1),
        ))
        violation = validate_well_formed(history)
        assert violation.index == 1
        assert "pending" in violation.rule

    def test_read_response_needs_a_value(self):
        history = History(events=(
            _event(EventKind.INVOCATION, 2, OpKind.READ, "X1", None, 0),
            _event(EventKind.RESPONSE, 2, OpKind.READ, "X1", None, 1),
        ))
        with pytest.raises(MalformedHistoryError):
            ensure_well_formed(history)

    def test_other_clients_may_interleave(self, recorder):
        recorder.invoke(1, OpKind.WRITE, "X1", data("a"))
        recorder.invoke(2, OpKind.READ, "X1")
        recorder.respond(1)
        recorder.respond(2, data("a"))
        assert validate_well_formed(recorder.history()) is None


class TestOperations:
    def test_alpha_has_nine_complete_operations(self, alpha):
        assert len(complete_ops(alpha)) == 9
        assert pending_ops(alpha) == ()

    def test_pending_operation(self, recorder):
        recorder.write(2, "X2", data("v1"))
        recorder.invoke(1, OpKind.WRITE, "X1", data("u"))
        history = recorder.history()
        assert [op.label for op in complete_ops(history)] == ["w_2^1"]
        assert [op.label for op in pending_ops(history)] == ["w_1^1"]

    def test_labels_count_per_client_and_kind(self, gamma):
        labels = [op.label for op in gamma.operations]
        assert labels[:4] == ["w_2^1", "r_2^1", "w_2^2", "r_2^2"]
        assert "w_1^1" in labels and "r_1^1" in labels


class TestPrecedence:
    """o < o2 iff o completes before o2 is invoked."""

    def setup_method(self):
        self.history = History(events=(
            _event(EventKind.INVOCATION, 1, OpKind.WRITE, "X1", data("a"), 0),
            _event(EventKind.INVOCATION, 2, OpKind.READ, "X1", None, 1),
            _event(EventKind.RESPONSE, 1, OpKind.WRITE, "X1", None, 2),
            _event(EventKind.RESPONSE, 2, OpKind.READ, "X1", data("a"), 3),
            _event(EventKind.INVOCATION, 1, OpKind.READ, "X2", None, 4),
            _event(EventKind.RESPONSE, 1, OpKind.READ, "X2", BOTTOM, 5),
        ))
        self.write, self.read2, self.read1 = self.history.operations

    def test_overlapping_operations_are_concurrent(self):
        assert not precedes(self.write, self.read2)
        assert not precedes(self.read2, self.write)
        assert concurrent(self.write, self.read2)

    def test_sequential_operations(self):
        assert precedes(self.write, self.read1)
        assert precedes(self.read2, self.read1)
        assert not concurrent(self.write, self.read1)

    def test_irreflexive(self):
        for op in self.history.operations:
            assert not precedes(op, op)
            assert not concurrent(op, op)

    def test_is_sequential(self, alpha):
        assert not is_sequential(self.history)
        assert not is_sequential(alpha)  # w_1^1 spans r_2^3

    def test_single_client_history_is_sequential(self, recorder):
        recorder.write(1, "X1", data("a"))
        recorder.read(1, "X1", data("a"))
        assert is_sequential(recorder.history())

    @settings(max_examples=60, deadline=None)
    @given(histories(max_events=10))
    def test_strict_partial_order(self, history):
        ops = [op for op in history.operations if op.is_complete]
        for a in ops:
            assert not precedes(a, a)
            for b in ops:
                if precedes(a, b):
                    assert not precedes(b, a)
                for c in ops:
                    if precedes(a, b) and precedes(b, c):
                        assert precedes(a, c)


class TestProjection:
    def test_gamma_is_alpha_to_c2(self, alpha, gamma):
        assert project_client(gamma, 2) == project_client(alpha, 2)

    def test_gamma_is_beta_to_c1(self, beta, gamma):
        assert project_client(gamma, 1) == project_client(beta, 1)

    def test_alpha_projected_on_c1_is_the_write(self, alpha):
        local = project_client(alpha, 1)
        assert [e.kind for e in local] == [EventKind.INVOCATION, EventKind.RESPONSE]
        assert {e.label for e in local} == {"w_1^1"}

    def test_view_projection_keeps_order(self, alpha):
        view = View(ops=alpha.operations)
        assert [op.label for op in project_client(view, 1)] == ["w_1^1"]
        assert len(project_client(view, 2)) == 8

    @settings(max_examples=60, deadline=None)
    @given(histories(max_events=12))
    def test_projections_partition_the_events(self, history):
        total = sum(len(project_client(history, c)) for c in history.clients)
        assert total == len(history.events)


class TestViews:
    def setup_method(self):
        rec = HistoryRecorder()
        rec.write(1, "X1", data("a"))
        rec.read(2, "X1", data("a"))
        rec.write(1, "X1", data("b"))
        self.history = rec.history()
        self.w_a, self.r, self.w_b = self.history.operations

    def test_prefix_through(self):
        view = View(owner=1, ops=self.history.operations)
        assert prefix_through(view, self.r).labels() == ["w_1^1", "r_2^1"]

    def test_prefix_through_missing_operation(self):
        view = View(owner=1, ops=(self.w_a,))
        with pytest.raises(ValueError):
            prefix_through(view, self.w_b)

    def test_real_time_inversion(self):
        assert preserves_real_time(View(ops=(self.w_a, self.r, self.w_b)))
        assert not preserves_real_time(View(ops=(self.w_b, self.w_a)))

    def test_client_order_ignores_other_clients(self):
        # r_2^1 after w_1^2 inverts real time across clients, which π may do.
        view = View(ops=(self.w_a, self.w_b, self.r))
        assert not preserves_real_time(view)
        assert preserves_client_order(view)

    @settings(max_examples=40, deadline=None)
    @given(histories(max_events=8))
    def test_real_time_matches_pairwise_definition(self, history):
        ops = [op for op in history.operations if op.is_complete]
        for order in permutations(ops):
            pairwise = all(
                not precedes(order[j], order[i])
                for i in range(len(order)) for j in range(i + 1, len(order))
            )
            assert preserves_real_time(View(ops=order)) == pairwise


def test_models_import_without_warnings():
    result = subprocess.run(
        [sys.executable, "-W", "error::UserWarning", "-c", "import forkcheck.models"],
        capture_output=True, text=True, cwd=Path(__file__).parent.parent,
    )
    assert result.returncode == 0, result.stderr
