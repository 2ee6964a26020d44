"""Tests for the SWMR register specification."""

from __future__ import annotations

import pytest

from forkcheck.errors import SpecViolationError
from forkcheck.history.recorder import HistoryRecorder
from forkcheck.history.registers import (
    check_sequential_spec,
    check_single_writer,
    check_unique_writes,
    ensure_checkable,
    writes_by_value,
)
from forkcheck.models import BOTTOM, SpecViolationKind, View, data


def _view(*steps) -> View:
    rec = HistoryRecorder()
    for client, kind, register, value in steps:
        if kind == "w":
            rec.write(client, register, data(value))
        else:
            rec.read(client, register, BOTTOM if value is None else data(value))
    return View(ops=rec.history().operations)


class TestSequentialSpec:
    def test_empty_view(self):
        assert check_sequential_spec(View()) is None

    def test_read_of_initial_value(self):
        assert check_sequential_spec(_view((2, "r", "X1", None))) is None

    def test_read_returns_latest_write(self):
        view = _view((1, "w", "X1", "a"), (1, "w", "X1", "b"), (2, "r", "X1", "b"))
        assert check_sequential_spec(view) is None

    def test_stale_read(self):
        view = _view((1, "w", "X1", "a"), (1, "w", "X1", "b"), (2, "r", "X1", "a"))
        violation = check_sequential_spec(view)
        assert violation.kind is SpecViolationKind.STALE_READ
        assert violation.expected == data("b")
        assert violation.at.label == "r_2^1"

    def test_read_of_bottom_after_write_is_stale(self):
        view = _view((1, "w", "X1", "a"), (2, "r", "X1", None))
        assert check_sequential_spec(view).kind is SpecViolationKind.STALE_READ

    def test_value_never_written(self):
        view = _view((1, "w", "X1", "a"), (2, "r", "X1", "zz"))
        violation = check_sequential_spec(view)
        assert violation.kind is SpecViolationKind.UNKNOWN_VALUE
        assert "never written" in violation.describe()

    def test_registers_are_independent(self):
        view = _view((1, "w", "X1", "a"), (2, "r", "X2", None), (2, "r", "X1", "a"))
        assert check_sequential_spec(view) is None

    def test_generated_views(self, alpha):
        # α in invocation order is not legal: r_2^3 returns ⊥ after w_1^1 is invoked.
        assert check_sequential_spec(View(ops=alpha.operations)) is not None


class TestPreconditions:
    def setup_method(self):
        self.rec = HistoryRecorder()

    def test_single_writer(self, spec):
        self.rec.write(1, "X1", data("a"))
        self.rec.read(2, "X1", data("a"))
        assert check_single_writer(self.rec.history(), spec) is None

    def test_wrong_writer(self, spec):
        self.rec.write(2, "X1", data("a"))
        violation = check_single_writer(self.rec.history(), spec)
        assert violation.kind is SpecViolationKind.WRONG_WRITER

    def test_duplicate_write(self, spec):
        self.rec.write(1, "X1", data("a"))
        self.rec.write(1, "X1", data("a"))
        violation = check_unique_writes(self.rec.history(), spec)
        assert violation.kind is SpecViolationKind.DUPLICATE_WRITE
        with pytest.raises(SpecViolationError):
            ensure_checkable(self.rec.history(), spec)

    def test_same_value_in_different_registers(self, spec):
        self.rec.write(1, "X1", data("a"))
        self.rec.write(2, "X2", data("a"))
        assert check_unique_writes(self.rec.history(), spec) is None

    def test_spec_violation_error_is_a_value_error(self, spec):
        self.rec.write(2, "X1", data("a"))
        with pytest.raises(ValueError, match="register specification violated"):
            ensure_checkable(self.rec.history(), spec)

    def test_writes_by_value(self, alpha):
        index = writes_by_value(alpha)
        assert index[("X1", data("u"))].label == "w_1^1"
        assert index[("X2", data("v3"))].label == "w_2^3"
