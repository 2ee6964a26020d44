"""Tests for the trace file codec."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, settings

from forkcheck.errors import TraceFormatError
from forkcheck.models import BOTTOM, EventKind, TraceSource, data
from forkcheck.trace import emit_trace, parse_trace, read_trace, trace_body, write_trace
from strategies import histories

HEADER = '{"registers":{"X1":1,"X2":2},"comment":"","source":"external"}'


class TestEmit:
    def test_header_and_lines(self, alpha):
        text = emit_trace(alpha, comment="alpha", source=TraceSource.GENERATED)
        lines = text.splitlines()
        assert len(lines) == len(alpha.events) + 1
        header = json.loads(lines[0])
        assert header == {"registers": {"X1": 1, "X2": 2}, "comment": "alpha", "source": "generated"}
        assert json.loads(lines[1]) == {
            "kind": "inv", "client": 2, "op": "write", "reg": "X2", "value": "v1", "label": "w_2^1",
        }

    def test_bottom_is_null(self, alpha):
        lines = emit_trace(alpha).splitlines()
        read_response = json.loads(lines[4])
        assert read_response["kind"] == "res" and read_response["op"] == "read"
        assert read_response["value"] is None

    def test_golden_gamma(self, gamma, data_dir):
        from forkcheck.scenarios.executions import TIMING_ASSUMPTION

        text = emit_trace(
            gamma, comment=f"gamma z=4 l=1; {TIMING_ASSUMPTION}", source=TraceSource.GENERATED
        )
        assert text == (data_dir / "gamma_z4_l1.jsonl").read_text(encoding="utf-8")

    def test_body_drops_header(self, alpha):
        assert trace_body(emit_trace(alpha, comment="x")) == trace_body(emit_trace(alpha, comment="y"))


class TestParse:
    def test_golden_file(self, gamma, data_dir):
        trace = read_trace(data_dir / "gamma_z4_l1.jsonl")
        assert trace.history.events == gamma.events
        assert trace.header.source is TraceSource.GENERATED
        assert trace.header.register_spec.writer_of("X1") == 1

    def test_null_read_response_is_bottom(self):
        text = HEADER + "\n" + "\n".join([
            '{"kind":"inv","client":2,"op":"read","reg":"X1","value":null,"label":"r"}',
            '{"kind":"res","client":2,"op":"read","reg":"X1","value":null,"label":"r"}',
        ])
        events = parse_trace(text).history.events
        assert events[0].value is None
        assert events[1].value == BOTTOM
        assert events[1].kind is EventKind.RESPONSE

    def test_empty_body(self):
        assert parse_trace(HEADER + "\n").history.events == ()

    def test_missing_header(self):
        with pytest.raises(TraceFormatError) as info:
            parse_trace("")
        assert info.value.line == 1

    def test_truncated_line(self, alpha):
        text = emit_trace(alpha)
        cut = text[: text.index("\n", len(text) // 2) - 5]
        with pytest.raises(TraceFormatError) as info:
            parse_trace(cut)
        assert info.value.line == len(cut.splitlines())

    def test_malformed_event_reports_its_line(self):
        text = HEADER + "\n" + "\n".join([
            '{"kind":"inv","client":1,"op":"write","reg":"X1","value":"a","label":"w"}',
            '{"kind":"res","client":2,"op":"read","reg":"X1","value":"a","label":"r"}',
        ])
        with pytest.raises(TraceFormatError) as info:
            parse_trace(text)
        assert info.value.line == 3

    def test_undeclared_register(self):
        text = HEADER + "\n" + '{"kind":"inv","client":1,"op":"read","reg":"X7","value":null,"label":""}'
        with pytest.raises(TraceFormatError, match="X7"):
            parse_trace(text)

    def test_write_of_bottom(self):
        text = HEADER + "\n" + '{"kind":"inv","client":1,"op":"write","reg":"X1","value":null,"label":""}'
        with pytest.raises(TraceFormatError):
            parse_trace(text)

    @pytest.mark.parametrize("line, message", [
        ('{"kind":"inv","client":2,"op":"read","reg":"X1","value":"a","label":"r"}',
         "read invocation carries a value"),
        ('{"kind":"res","client":1,"op":"write","reg":"X1","value":"a","label":"w"}',
         "write response carries a value"),
    ])
    def test_value_where_none_belongs(self, line, message):
        text = HEADER + "\n" + '{"kind":"inv","client":1,"op":"write","reg":"X1","value":"a","label":"w"}'
        text += "\n" + line
        with pytest.raises(TraceFormatError, match=message) as info:
            parse_trace(text)
        assert info.value.line == 3

    def test_unknown_field(self):
        text = HEADER + "\n" + '{"kind":"inv","client":1,"op":"read","reg":"X1","value":null,"extra":1}'
        with pytest.raises(TraceFormatError) as info:
            parse_trace(text)
        assert info.value.line == 2

    def test_write_and_read_file(self, tmp_path, beta):
        path = write_trace(tmp_path / "nested" / "beta.jsonl", emit_trace(beta))
        assert read_trace(path).history.events == beta.events

    @settings(max_examples=80, deadline=None)
    @given(histories(max_events=14))
    def test_parse_inverts_emit(self, history):
        assert parse_trace(emit_trace(history)).history.events == history.events

    def test_values_are_opaque_strings(self, recorder):
        recorder.write(1, "X1", data("bot"))
        recorder.read(2, "X1", data("bot"))
        events = parse_trace(emit_trace(recorder.history())).history.events
        assert events[3].value == data("bot")
