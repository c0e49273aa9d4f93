"""
Tests for the trace decorator: outcome records, durations and parameter capture.
"""

import json
import logging
from fractions import Fraction

import pytest

from kzassoc import setup_logging, trace
from kzassoc.holonomy import cyclotomic_alphabet
from kzassoc.ncseries import Series


def _last_record(capsys):
    return json.loads(capsys.readouterr().err.strip().split("\n")[-1])


class TestTraceSuccess:
    def test_success_log_message(self, capsys):
        setup_logging(log_to_file=None)

        @trace
        def build_table():
            return "done"

        assert build_table() == "done"
        parsed = _last_record(capsys)
        assert parsed["level"] == "INFO"
        assert parsed["type"] == "trace"
        assert parsed["message"].startswith("trace complete: ")
        assert parsed["message"].endswith("build_table [success]")
        assert parsed["trace.result"] == "success"
        assert parsed["trace.duration"] >= 0

    def test_function_name_preserved(self):
        @trace
        def original_name():
            pass

        assert original_name.__name__ == "original_name"

    def test_qualified_name_includes_module(self, capsys):
        setup_logging(log_to_file=None)

        @trace
        def solve():
            return 1

        solve()
        parsed = _last_record(capsys)
        assert parsed["trace.function"].startswith(__name__ + ".")


class TestTraceFailure:
    def test_failure_log_message(self, capsys):
        setup_logging(log_to_file=None)

        @trace
        def failing_solve():
            raise ValueError("pole on the path")

        with pytest.raises(ValueError, match="pole on the path"):
            failing_solve()
        parsed = _last_record(capsys)
        assert parsed["level"] == "ERROR"
        assert parsed["trace.result"] == "error"
        assert "failing_solve [error]" in parsed["message"]
        assert "ValueError" in parsed["exception.stacktrace"]

    def test_failure_includes_params(self, capsys):
        setup_logging(log_to_file=None)

        @trace
        def fail_with_args(N, degree):
            raise RuntimeError("boom")

        with pytest.raises(RuntimeError):
            fail_with_args(4, 3)
        assert _last_record(capsys)["attributes"]["params"] == {"N": 4, "degree": 3}


class TestTraceParamCapture:
    def test_captures_defaults(self, capsys):
        setup_logging(log_to_file=None)

        @trace
        def compute(N, degree=5):
            return N

        compute(2)
        assert _last_record(capsys)["attributes"]["params"] == {"N": 2, "degree": 5}

    def test_skips_self_on_method(self, capsys):
        setup_logging(log_to_file=None)

        class Store:
            @trace
            def series(self, name):
                return name

        Store().series("Psi4")
        assert _last_record(capsys)["attributes"]["params"] == {"name": "Psi4"}

    def test_ignore_params(self, capsys):
        setup_logging(log_to_file=None)

        @trace(ignore_params=["store"])
        def verify(config, store=None):
            return True

        verify("cfg", store=object())
        assert _last_record(capsys)["attributes"]["params"] == {"config": "cfg"}

    def test_series_and_exact_values_are_summarized(self, capsys):
        setup_logging(log_to_file=None)
        f3 = cyclotomic_alphabet(2)

        @trace
        def consume(series, point):
            return series.degree

        consume(Series.one(f3, 2, 64), Fraction(1, 2))
        params = _last_record(capsys)["attributes"]["params"]
        assert params == {"series": "<Series f3 d=2>", "point": "1/2"}

    def test_non_serializable_replaced_with_classname(self, capsys):
        setup_logging(log_to_file=None)

        class Opaque:
            pass

        @trace
        def take(value):
            return value

        take(Opaque())
        assert _last_record(capsys)["attributes"]["params"] == {"value": "<Opaque>"}


def test_trace_without_setup_does_not_fail():
    logging.getLogger().handlers.clear()

    @trace
    def quiet():
        return 3

    assert quiet() == 3
