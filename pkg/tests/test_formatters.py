"""
Unit tests for JsonLogFormatter, in isolation.
"""

import json
import logging
import sys

import pytest

from kzassoc.formatters import JsonLogFormatter


@pytest.fixture
def make_record():
    """Helper to create a log record with optional extras."""

    def _make(
        msg="test message",
        level=logging.INFO,
        logger_name="test.logger",
        exc_info=None,
        extra=None,
    ):
        logger = logging.getLogger(logger_name)
        return logger.makeRecord(
            name=logger_name,
            level=level,
            fn="test_file.py",
            lno=42,
            msg=msg,
            args=(),
            exc_info=exc_info,
            extra=extra,
        )

    return _make


class TestJsonLogFormatterDefaults:
    """Test default (zero-config) behavior."""

    def test_output_is_valid_json(self, make_record):
        parsed = json.loads(JsonLogFormatter().format(make_record()))
        assert isinstance(parsed, dict)

    def test_default_fields_present(self, make_record):
        parsed = json.loads(JsonLogFormatter().format(make_record()))
        for key in ("timestamp", "level", "message", "service.name", "log.logger"):
            assert key in parsed
        assert parsed["log.origin.file.line"] == 42

    def test_level_names(self, make_record):
        formatter = JsonLogFormatter()
        for level, name in [
            (logging.DEBUG, "DEBUG"),
            (logging.INFO, "INFO"),
            (logging.WARNING, "WARNING"),
            (logging.ERROR, "ERROR"),
        ]:
            assert json.loads(formatter.format(make_record(level=level)))["level"] == name

    def test_default_timestamp_is_iso_format(self, make_record):
        parsed = json.loads(JsonLogFormatter().format(make_record()))
        assert parsed["timestamp"].endswith("Z")
        assert "T" in parsed["timestamp"]

    def test_default_service_name_without_env(self, make_record, monkeypatch):
        monkeypatch.delenv("SERVICE_NAME", raising=False)
        parsed = json.loads(JsonLogFormatter().format(make_record()))
        assert parsed["service.name"] == "kzassoc"

    def test_service_name_from_env(self, make_record, monkeypatch):
        monkeypatch.setenv("SERVICE_NAME", "associator-batch")
        parsed = json.loads(JsonLogFormatter().format(make_record()))
        assert parsed["service.name"] == "associator-batch"

    def test_unicode_message(self, make_record):
        parsed = json.loads(JsonLogFormatter().format(make_record(msg="Möbius ζ(2)")))
        assert parsed["message"] == "Möbius ζ(2)"


class TestJsonLogFormatterRunContext:
    """Fields injected by RunContextFilter."""

    def test_no_run_ctx_no_run_fields(self, make_record):
        parsed = json.loads(JsonLogFormatter().format(make_record()))
        assert "run_id" not in parsed

    def test_run_ctx_fields_added(self, make_record):
        record = make_record()
        record.run_ctx = {"run_id": "r-1", "command": "verify-all", "precision_bits": 192}
        parsed = json.loads(JsonLogFormatter().format(record))
        assert parsed["run_id"] == "r-1"
        assert parsed["command"] == "verify-all"
        assert parsed["precision_bits"] == 192

    def test_custom_run_id_field(self, make_record):
        record = make_record()
        record.run_ctx = {"run_id": "r-2"}
        parsed = json.loads(JsonLogFormatter(run_id_field="runId").format(record))
        assert parsed["runId"] == "r-2"
        assert "run_id" not in parsed


class TestJsonLogFormatterAttributes:
    """``extra={'data': ...}`` and trace records."""

    def test_data_attribute_added(self, make_record):
        record = make_record(extra={"data": {"relation": "hexagon-psi4", "passed": True}})
        parsed = json.loads(JsonLogFormatter().format(record))
        assert parsed["attributes"] == {"relation": "hexagon-psi4", "passed": True}

    def test_no_data_no_attributes_field(self, make_record):
        parsed = json.loads(JsonLogFormatter().format(make_record()))
        assert "attributes" not in parsed

    def test_trace_data_fields(self, make_record):
        trace_data = {
            "function": "kzassoc.t4algebra.build_normal_forms",
            "result": "success",
            "duration": 0.25,
            "params": {"degree": 4},
        }
        record = make_record(extra={"trace_data": trace_data})
        parsed = json.loads(JsonLogFormatter().format(record))
        assert parsed["type"] == "trace"
        assert parsed["trace.function"] == "kzassoc.t4algebra.build_normal_forms"
        assert parsed["trace.duration"] == 0.25
        assert parsed["attributes"] == {"params": {"degree": 4}}

    def test_non_json_values_are_stringified(self, make_record):
        record = make_record(extra={"data": {"point": object()}})
        parsed = json.loads(JsonLogFormatter().format(record))
        assert parsed["attributes"]["point"].startswith("<object object")


class TestJsonLogFormatterExceptions:
    def test_exception_stacktrace_included(self, make_record):
        try:
            raise ValueError("pole on the path")
        except ValueError:
            record = make_record(level=logging.ERROR, exc_info=sys.exc_info())
        parsed = json.loads(JsonLogFormatter().format(record))
        assert "ValueError: pole on the path" in parsed["exception.stacktrace"]

    def test_no_exception_no_stacktrace_field(self, make_record):
        parsed = json.loads(JsonLogFormatter().format(make_record()))
        assert "exception.stacktrace" not in parsed


class TestJsonLogFormatterCustomConfig:
    def test_unix_timestamp(self, make_record):
        parsed = json.loads(JsonLogFormatter(timestamp_format="unix").format(make_record()))
        assert isinstance(parsed["timestamp"], float)

    def test_minimal_output(self, make_record):
        formatter = JsonLogFormatter(
            include_service_name=False,
            include_logger_name=False,
            include_line_number=False,
        )
        parsed = json.loads(formatter.format(make_record()))
        assert set(parsed) == {"timestamp", "level", "message"}
