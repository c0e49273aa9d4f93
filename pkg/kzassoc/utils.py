"""
Helpers for turning call arguments into log-friendly values.
"""

import inspect
import json
import sys
from fractions import Fraction

import sympy


def resolve_module_name(func):
    """Return the dotted module of *func*, also when it lives in ``__main__``.

    ``python -m kzassoc`` leaves ``func.__module__ == "__main__"``; the module
    spec still carries the real name in that case.
    """
    module = func.__module__
    if module != "__main__":
        return module
    main_mod = sys.modules.get("__main__")
    if main_mod and getattr(main_mod, "__spec__", None) and main_mod.__spec__.name:
        return main_mod.__spec__.name
    return module


def summarize_value(value):
    """Short text for values that carry their own ``summary`` or exact numbers."""
    if isinstance(value, (Fraction, sympy.Basic)):
        return str(value)
    if hasattr(value, "_mpf_") or hasattr(value, "_mpc_"):
        return str(value)
    if hasattr(value, "alphabet") and hasattr(value, "degree"):
        return f"<{type(value).__name__} {value.alphabet.name} d={value.degree}>"
    return None


def safe_serialize_value(value):
    """Return a JSON-serializable representation of *value*.

    Series, generator maps and exact numbers become short strings; anything
    else that does not survive ``json.dumps`` is replaced by ``<ClassName>``.
    """
    summary = summarize_value(value)
    if summary is not None:
        return summary
    try:
        json.dumps(value)
        return value
    except (TypeError, ValueError, OverflowError):
        return f"<{type(value).__name__}>"


def collect_params(func, args, kwargs, ignore_params=None, auto_skip_params=None):
    """Build a serializable dict of the function's bound arguments."""
    ignore = set(auto_skip_params or ()) | set(ignore_params or ())
    try:
        bound = inspect.signature(func).bind(*args, **kwargs)
        bound.apply_defaults()
    except (TypeError, ValueError):
        return {}
    return {
        name: safe_serialize_value(value)
        for name, value in bound.arguments.items()
        if name not in ignore
    }
