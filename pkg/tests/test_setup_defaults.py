"""
End-to-end tests of setup_logging() with its defaults.
Records are JSON on STDERR; STDOUT stays free for reports.
"""

import json
import logging
import warnings

import pytest

from kzassoc import setup_logging


class TestSetupLoggingBasic:
    """Test basic setup behavior."""

    def test_setup_adds_handlers(self):
        setup_logging(log_to_file=None)
        root = logging.getLogger()
        assert len(root.handlers) > 0

    def test_setup_is_idempotent(self):
        setup_logging(log_to_file=None)
        handler_count = len(logging.getLogger().handlers)
        setup_logging(log_to_file=None)
        assert len(logging.getLogger().handlers) == handler_count

    def test_default_log_level_is_info(self, monkeypatch):
        monkeypatch.delenv("LOG_LEVEL", raising=False)
        setup_logging(log_to_file=None)
        assert logging.getLogger().level == logging.INFO

    def test_custom_log_level_from_env(self, monkeypatch):
        monkeypatch.setenv("LOG_LEVEL", "DEBUG")
        setup_logging(log_to_file=None)
        assert logging.getLogger().level == logging.DEBUG

    def test_log_level_case_insensitive(self, monkeypatch):
        monkeypatch.setenv("LOG_LEVEL", "warning")
        setup_logging(log_to_file=None)
        assert logging.getLogger().level == logging.WARNING

    def test_invalid_log_level_falls_back_to_info(self, monkeypatch):
        monkeypatch.setenv("LOG_LEVEL", "INVALID_LEVEL")
        with pytest.warns(UserWarning, match="Invalid LOG_LEVEL"):
            setup_logging(log_to_file=None)
        assert logging.getLogger().level == logging.INFO


class TestSetupLoggingStderr:
    """Records go to STDERR and never to STDOUT."""

    def test_log_to_stderr_json(self, capsys):
        setup_logging(log_to_file=None)
        logging.getLogger("test.stderr").info("hello stderr")
        captured = capsys.readouterr()
        parsed = json.loads(captured.err.strip())
        assert parsed["message"] == "hello stderr"
        assert parsed["level"] == "INFO"
        assert captured.out == ""

    def test_stderr_contains_run_context(self, capsys, monkeypatch):
        monkeypatch.setenv("KZASSOC_RUN_ID", "run-123")
        setup_logging(log_to_file=None)
        logging.getLogger("test.ctx").info("with context")
        parsed = json.loads(capsys.readouterr().err.strip())
        assert parsed["run_id"] == "run-123"
        assert parsed["service.name"] == "kzassoc"

    def test_stderr_multiple_log_levels(self, capsys, monkeypatch):
        monkeypatch.setenv("LOG_LEVEL", "DEBUG")
        setup_logging(log_to_file=None)
        logger = logging.getLogger("test.levels")
        logger.debug("debug msg")
        logger.info("info msg")
        logger.warning("warn msg")
        lines = capsys.readouterr().err.strip().split("\n")
        assert [json.loads(line)["level"] for line in lines] == ["DEBUG", "INFO", "WARNING"]

    def test_debug_not_shown_at_info_level(self, capsys, monkeypatch):
        monkeypatch.delenv("LOG_LEVEL", raising=False)
        setup_logging(log_to_file=None)
        logger = logging.getLogger("test.filter_level")
        logger.debug("should not appear")
        logger.info("should appear")
        lines = capsys.readouterr().err.strip().split("\n")
        assert len(lines) == 1
        assert json.loads(lines[0])["message"] == "should appear"

    def test_data_extra_becomes_attributes(self, capsys):
        setup_logging(log_to_file=None)
        logging.getLogger("test.data").info(
            "holonomy computed", extra={"data": {"N": 4, "degree": 3}}
        )
        parsed = json.loads(capsys.readouterr().err.strip())
        assert parsed["attributes"] == {"N": 4, "degree": 3}


class TestSetupLoggingFile:
    """Test the optional log file."""

    def test_log_to_file_when_param_set(self, tmp_path):
        log_path = tmp_path / "run.log"
        setup_logging(log_to_file=str(log_path))
        logging.getLogger("test.file").info("file message")
        for h in logging.getLogger().handlers:
            h.flush()
        parsed = json.loads(log_path.read_text().strip())
        assert parsed["message"] == "file message"

    def test_no_file_when_param_is_none(self):
        setup_logging(log_to_file=None)
        file_handlers = [
            h for h in logging.getLogger().handlers if isinstance(h, logging.FileHandler)
        ]
        assert file_handlers == []

    def test_file_and_stderr_both_receive_logs(self, capsys, tmp_path):
        log_path = tmp_path / "both.log"
        setup_logging(log_to_file=str(log_path))
        logging.getLogger("test.both").warning("both places")
        for h in logging.getLogger().handlers:
            h.flush()
        stderr_parsed = json.loads(capsys.readouterr().err.strip())
        file_parsed = json.loads(log_path.read_text().strip())
        assert stderr_parsed["message"] == file_parsed["message"] == "both places"


class TestSetupLoggingWarnings:
    """warnings.warn is routed through the JSON handlers exactly once."""

    def test_warning_captured_to_stderr(self, capsys):
        setup_logging(log_to_file=None)
        warnings.warn("tail bound is loose", UserWarning)
        lines = capsys.readouterr().err.strip().split("\n")
        assert len(lines) == 1
        parsed = json.loads(lines[0])
        assert parsed["level"] == "WARNING"
        assert "tail bound is loose" in parsed["message"]


class TestSetupLoggingExceptionOutput:
    """logger.exception attaches the stack trace."""

    def test_exception_in_stderr(self, capsys):
        setup_logging(log_to_file=None)
        try:
            raise ZeroDivisionError("bad pivot")
        except ZeroDivisionError:
            logging.getLogger("test.exc").exception("elimination failed")
        parsed = json.loads(capsys.readouterr().err.strip())
        assert parsed["level"] == "ERROR"
        assert "ZeroDivisionError" in parsed["exception.stacktrace"]
