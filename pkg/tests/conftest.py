"""
Shared fixtures: a clean root logger per test and one small associator store per session.
"""

import logging

import pytest

from kzassoc.relations import AssociatorStore
from kzassoc.t4algebra import build_normal_forms


def _close_and_clear_handlers(logger):
    """Close all handlers on a logger and clear the list."""
    for h in logger.handlers[:]:
        h.close()
    logger.handlers.clear()


def _reset_root():
    root = logging.getLogger()
    _close_and_clear_handlers(root)
    root.setLevel(logging.WARNING)
    root._kzassoc_configured = False
    warnings_logger = logging.getLogger("py.warnings")
    _close_and_clear_handlers(warnings_logger)
    warnings_logger.propagate = True
    logging.captureWarnings(False)


@pytest.fixture(autouse=True)
def reset_logging():
    """Reset root logger before and after each test."""
    _reset_root()
    yield
    _reset_root()


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Commands built from a RunConfig never touch the user's cache directory."""
    monkeypatch.setenv("KZASSOC_CACHE_DIR", str(tmp_path / "cache"))


@pytest.fixture(scope="session")
def store():
    """Associators at 128 bits with 80 terms: Phi to degree 6, Psi2 to 4, Psi4 to 3."""
    return AssociatorStore(prec=128, terms=80, compute_degrees={1: 6, 2: 4, 4: 3})


@pytest.fixture(scope="session")
def table():
    return build_normal_forms(4)
