"""
JSON log formatter.
"""

import datetime
import json
import logging
import os

DEFAULT_SERVICE_NAME = "kzassoc"


class JsonLogFormatter(logging.Formatter):
    """
    One JSON object per log record.

    Fields:
        - timestamp: ISO 8601 with 'Z' suffix, or unix seconds
        - level, message
        - service.name: from SERVICE_NAME (default: kzassoc)
        - log.logger, log.origin.file.line
        - run context injected by RunContextFilter (run_id, command, ...)
        - attributes: numerical progress passed via extra={'data': {...}}
        - type/trace.function/trace.result/trace.duration for @trace records,
          with the call parameters under attributes.params
        - exception.stacktrace when an exception is attached

    Args:
        run_id_field (str): Output name of the run identifier (default: "run_id")
        timestamp_format (str): "iso" or "unix" (default: "iso")
        include_service_name (bool): Emit service.name (default: True)
        include_logger_name (bool): Emit log.logger (default: True)
        include_line_number (bool): Emit log.origin.file.line (default: True)

    Example:
        formatter = JsonLogFormatter(run_id_field="runId", timestamp_format="unix")
    """

    def __init__(
        self,
        run_id_field="run_id",
        timestamp_format="iso",
        include_service_name=True,
        include_logger_name=True,
        include_line_number=True,
    ):
        super().__init__()
        self.run_id_field = run_id_field
        self.timestamp_format = timestamp_format
        self.include_service_name = include_service_name
        self.include_logger_name = include_logger_name
        self.include_line_number = include_line_number

    def _timestamp(self, record):
        if self.timestamp_format == "unix":
            return record.created
        return (
            datetime.datetime.fromtimestamp(record.created, tz=datetime.timezone.utc)
            .isoformat()
            .replace("+00:00", "Z")
        )

    def format(self, record):
        log_record = {
            "timestamp": self._timestamp(record),
            "level": record.levelname,
            "message": record.getMessage(),
        }
        if self.include_service_name:
            log_record["service.name"] = os.getenv("SERVICE_NAME", DEFAULT_SERVICE_NAME)
        if self.include_logger_name:
            log_record["log.logger"] = record.name
        if self.include_line_number:
            log_record["log.origin.file.line"] = record.lineno

        for key, value in getattr(record, "run_ctx", {}).items():
            log_record[self.run_id_field if key == "run_id" else key] = value

        if hasattr(record, "trace_data"):
            td = record.trace_data
            log_record["type"] = "trace"
            log_record["trace.function"] = td["function"]
            log_record["trace.result"] = td["result"]
            log_record["trace.duration"] = td["duration"]
            log_record["attributes"] = {"params": td.get("params", {})}
        elif hasattr(record, "data"):
            log_record["attributes"] = record.data

        if record.exc_info:
            log_record["exception.stacktrace"] = self.formatException(record.exc_info)

        return json.dumps(log_record, ensure_ascii=False, default=str)
