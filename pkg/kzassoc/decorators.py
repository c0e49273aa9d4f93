"""
Tracing decorator for the expensive entry points (solves, table builds, verifiers).
"""

import functools
import logging
import time

from .utils import collect_params, resolve_module_name

_AUTO_SKIP_PARAMS = {"self", "cls"}


def trace(_func=None, *, ignore_params=None):
    """Log one ``trace complete`` record per call, with duration and parameters.

    Usable bare or with arguments::

        @trace
        def build_normal_forms(degree):
            ...

        @trace(ignore_params=["context"])
        def bind_and_eval(relation, context):
            ...

    Series-valued parameters are logged as ``<Series f5 d=4>`` placeholders.
    Failures are logged with their stack trace and re-raised unchanged.
    """

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            module = resolve_module_name(func)
            logger = logging.getLogger(module)
            qualified_name = f"{module}.{func.__qualname__}"
            params = collect_params(func, args, kwargs, ignore_params, _AUTO_SKIP_PARAMS)
            start = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception:
                _log_outcome(logger, qualified_name, "error", start, params)
                raise
            _log_outcome(logger, qualified_name, "success", start, params)
            return result

        return wrapper

    if _func is not None:
        return decorator(_func)
    return decorator


def _log_outcome(logger, qualified_name, outcome, start, params):
    failed = outcome == "error"
    logger.log(
        logging.ERROR if failed else logging.INFO,
        f"trace complete: {qualified_name} [{outcome}]",
        extra={
            "trace_data": {
                "function": qualified_name,
                "result": outcome,
                "duration": time.perf_counter() - start,
                "params": params,
            }
        },
        exc_info=failed,
    )
