"""
Run configuration and numerical defaults.
"""

import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

DEFAULT_PRECISION_BITS = 192
DEFAULT_TERMS = 120
DEFAULT_TOLERANCE = 1e-20
T4_TOLERANCE = 1e-15
DEFAULT_POINT = Fraction(1, 2)
MIN_PRECISION_BITS = 64

COMPUTE_DEGREES = {1: 8, 2: 6, 4: 5}
FALLBACK_COMPUTE_DEGREE = 4
T4_DEGREE = 4
ORACLE_DEGREE = 2
ORACLE_EPSILON = 1e-7
ORACLE_TOLERANCE = 1e-4

# truncation degree per catalogue relation (grouped readings share their base)
RELATION_DEGREES = {
    "hexagon-psi4": 4,
    "okuda-psi4": 4,
    "octogon-psi4": 4,
    "broadhurst-psi2": 6,
    "ns1": 6,
    "ns2": 6,
    "ns1-connection": 6,
    "ns2-connection": 6,
    "phi-duality": 8,
    "phi-half": 8,
    "distributivity-delta42": 5,
    "distributivity-pi42": 5,
    "distributivity-delta41": 5,
    "distributivity-pi-phi": 5,
    "t4-relation": T4_DEGREE,
    "grouplike-phi": 8,
    "grouplike-psi2": 6,
    "grouplike-psi4": 5,
    "automorphism-presentation": 0,
    "t4-presentation": T4_DEGREE,
}

VERIFY_LEVELS = (1, 2, 4)
CACHE_ENV_VAR = "KZASSOC_CACHE_DIR"


def default_compute_degree(N):
    return COMPUTE_DEGREES.get(N, FALLBACK_COMPUTE_DEGREE)


def relation_degree(name):
    return RELATION_DEGREES.get(name.split("@", 1)[0], FALLBACK_COMPUTE_DEGREE)


def relation_tolerance(name):
    return T4_TOLERANCE if name.startswith("t4-") else DEFAULT_TOLERANCE


def default_cache_dir():
    """Cache directory from ``KZASSOC_CACHE_DIR``, else ``~/.cache/kzassoc``."""
    override = os.getenv(CACHE_ENV_VAR)
    if override:
        return Path(override)
    return Path.home() / ".cache" / "kzassoc"


class ConfigError(ValueError):
    """A run configuration failed validation."""


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs; validated before any computation starts.

    ``degree`` and ``tolerance`` are overrides: ``None`` selects the per-N or
    per-relation default.
    """

    command: str
    N: int = 4
    degree: int = None
    precision_bits: int = DEFAULT_PRECISION_BITS
    terms: int = DEFAULT_TERMS
    tolerance: float = None
    point: Fraction = DEFAULT_POINT
    catalogue: Path = None
    out: Path = None
    cache: Path = None
    relations: tuple = field(default_factory=tuple)

    def validate(self):
        if self.command in ("verify", "verify-all") and self.N not in VERIFY_LEVELS:
            raise ConfigError(f"--N {self.N} is not verifiable; choose one of {VERIFY_LEVELS}")
        if self.N < 1:
            raise ConfigError(f"--N must be a positive integer, got {self.N}")
        if self.degree is not None and self.degree < 0:
            raise ConfigError(f"--degree must be >= 0, got {self.degree}")
        if self.precision_bits < MIN_PRECISION_BITS:
            raise ConfigError(f"--prec-bits must be at least {MIN_PRECISION_BITS}")
        if self.terms < 1:
            raise ConfigError(f"--terms must be >= 1, got {self.terms}")
        if self.tolerance is not None and self.tolerance < 0:
            raise ConfigError(f"--tol must be >= 0, got {self.tolerance}")
        if not 0 < self.point < 1:
            raise ConfigError(f"--point must lie in ]0, 1[, got {self.point}")
        if self.catalogue is not None and not Path(self.catalogue).is_file():
            raise ConfigError(f"catalogue {self.catalogue} does not exist")
        return self

    @property
    def compute_degree(self):
        return default_compute_degree(self.N) if self.degree is None else self.degree

    def degree_for(self, relation):
        return relation_degree(relation) if self.degree is None else self.degree

    def tolerance_for(self, relation):
        return relation_tolerance(relation) if self.tolerance is None else self.tolerance

    def cache_dir(self):
        return Path(self.cache) if self.cache is not None else default_cache_dir()
