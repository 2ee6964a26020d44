"""Tests for extension enumeration."""

from __future__ import annotations

import pytest

from forkcheck.checkers.extensions import count_extensions, enumerate_extensions, read_candidates
from forkcheck.errors import BudgetExceeded
from forkcheck.history.operations import pending_ops, validate_well_formed
from forkcheck.history.recorder import HistoryRecorder
from forkcheck.models import BOTTOM, OpKind, SearchBudget, data


class TestExtensions:
    def setup_method(self):
        rec = HistoryRecorder()
        rec.invoke(1, OpKind.WRITE, "X1", data("a"))
        rec.write(2, "X2", data("b"))
        rec.invoke(2, OpKind.READ, "X1")
        self.history = rec.history()

    def test_read_candidates(self):
        assert read_candidates(self.history, "X1") == [BOTTOM, data("a")]
        assert read_candidates(self.history, "X2") == [BOTTOM, data("b")]

    def test_count(self):
        # w_1^1: drop or ok; r_2^1: drop, ⊥ or a
        assert count_extensions(self.history) == 6
        assert len(list(enumerate_extensions(self.history))) == 6

    def test_fewest_appended_first(self):
        sizes = [len(ext.appended) for ext in enumerate_extensions(self.history)]
        assert sizes[0] == 0
        assert sizes == sorted(sizes)

    def test_extensions_are_well_formed(self):
        for ext in enumerate_extensions(self.history):
            assert validate_well_formed(ext.history) is None

    def test_appended_events_only_complete_pending_operations(self):
        pending = {op.op_id for op in pending_ops(self.history)}
        for ext in enumerate_extensions(self.history):
            assert ext.completed_ids <= pending
            assert ext.history.events[: len(self.history.events)] == self.history.events

    def test_no_pending_operations(self, alpha):
        extensions = list(enumerate_extensions(alpha))
        assert len(extensions) == 1
        assert extensions[0].appended == ()

    def test_budget(self):
        gen = enumerate_extensions(self.history, budget=SearchBudget(max_extensions=2))
        next(gen)
        next(gen)
        with pytest.raises(BudgetExceeded):
            next(gen)
