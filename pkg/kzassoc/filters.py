"""
Logging filter injecting the run context into every record.
"""

import logging
import os


class RunContextFilter(logging.Filter):
    """
    Attach ``record.run_ctx`` with the identifiers of the current run.

    - run_id: first set variable of ``run_id_env_vars``
      (default: KZASSOC_RUN_ID, RUN_ID), else ``fallback_value``
    - additional_context: static fields (the CLI adds command and precision_bits)
    - additional_env_context: {"field": "ENV_VAR"} pairs, added when the variable is set

    Example:
        RunContextFilter(additional_context={"command": "verify-all"})
    """

    def __init__(
        self,
        run_id_env_vars=None,
        additional_context=None,
        additional_env_context=None,
        fallback_value="N/A",
    ):
        super().__init__()
        self.run_id_env_vars = run_id_env_vars or ["KZASSOC_RUN_ID", "RUN_ID"]
        self.additional_context = additional_context or {}
        self.additional_env_context = additional_env_context or {}
        self.fallback_value = fallback_value

    def _get_env_value(self, env_var_names):
        for env_var in env_var_names:
            value = os.getenv(env_var)
            if value:
                return value
        return self.fallback_value

    def filter(self, record):
        record.run_ctx = {"run_id": self._get_env_value(self.run_id_env_vars)}
        record.run_ctx.update(self.additional_context)
        for context_key, env_var_name in self.additional_env_context.items():
            value = os.getenv(env_var_name)
            if value:
                record.run_ctx[context_key] = value
        return True
