"""
Verification of the associator relations.

Every relation is checked in group form: the residual is ``LHS * RHS^-1`` and a
row passes when ``max |coeff(residual - 1)|`` is at most the tolerance.  The
catalogue relations are evaluated through :mod:`kzassoc.reldsl`; the same
relations are also available as hard-coded verifiers that perform the identical
sequence of operations, so both paths give bit-identical residuals.

Typical use::

    store = AssociatorStore(prec=192, terms=120)
    row = verify_hexagon_psi4(store)
    report = verify_all(RunConfig(command="verify-all"), store)
"""

import copy
import functools
import json
import logging
import time
from collections.abc import Mapping
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from importlib import resources
from pathlib import Path

import sympy

from .automorphisms import distribution_maps, named_automorphisms, presentation_checks
from .cache import DiskCache
from .config import (
    DEFAULT_POINT,
    DEFAULT_PRECISION_BITS,
    DEFAULT_TERMS,
    ConfigError,
    default_compute_degree,
    relation_degree,
    relation_tolerance,
)
from .decorators import trace
from .errors import SeriesFormatError
from .holonomy import (
    ConnectionData,
    Holonomy,
    cyclotomic_alphabet,
    ode_oracle_psi,
    phi_half_holonomy,
    psi_holonomy,
    renormalized_holonomy,
)
from .ncseries import (
    FREE,
    GeneratorMap,
    Series,
    _decimal,
    apply_hom,
    deserialize,
    exp,
    grouplike_residual,
    inverse,
    log,
    mul,
    residual_by_degree,
    scalar_context,
    scalar_power,
    to_document,
)
from .reldsl import EvalContext, bind_and_eval, parse_catalogue, referenced_names
from .t4algebra import (
    DEFAULT_MAX_WORDS,
    T4,
    TABLE_FORMAT,
    NormalFormTable,
    build_normal_forms,
    embed,
    embedding,
    hilbert_dimensions,
)

logger = logging.getLogger(__name__)

REPORT_FORMAT = "kzassoc.report/1"
CATALOGUE_RESOURCE = "associator_relations.rel"

F2 = cyclotomic_alphabet(1)
F3 = cyclotomic_alphabet(2)
F5 = cyclotomic_alphabet(4)
CATALOGUE_ALPHABETS = (F2, F3, F5, T4)


def series_level(name):
    """Level ``N`` of a named associator (``Phi`` and ``PhiHalf`` live at level 1)."""
    if name in ("Phi", "PhiHalf"):
        return 1
    if name.startswith("Psi") and name[3:].isdigit() and int(name[3:]) >= 1:
        return int(name[3:])
    return None


# ---------------------------------------------------------------------------
# associator store
# ---------------------------------------------------------------------------


class AssociatorStore:
    """Computes, caches and hands out the associators and the ``U(t4)`` table.

    Each associator is computed once, at the larger of the requested degree and
    its level's compute degree (``compute_degrees`` maps level to degree and
    defaults to the per-level defaults), and truncated for lower requests.  With a
    :class:`~kzassoc.cache.DiskCache` the assembled series and the table are
    read from and written to disk.
    """

    def __init__(
        self,
        prec=DEFAULT_PRECISION_BITS,
        terms=DEFAULT_TERMS,
        point=DEFAULT_POINT,
        cache=None,
        max_words=DEFAULT_MAX_WORDS,
        compute_degrees=None,
    ):
        self.prec = prec
        self.terms = terms
        self.point = Fraction(point)
        self.cache = cache
        self.max_words = max_words
        self.compute_degrees = compute_degrees
        self._holonomies = {}
        self._overrides = {}
        self._table = None

    @classmethod
    def from_config(cls, config):
        return cls(
            config.precision_bits,
            config.terms,
            config.point,
            cache=DiskCache(config.cache_dir()),
        )

    def __repr__(self):
        return f"<AssociatorStore P={self.prec} M={self.terms} point={self.point}>"

    def names(self):
        known = {"Phi", "PhiHalf", "Psi2", "Psi4"}
        return sorted(known | set(self._holonomies) | set(self._overrides))

    def knows(self, name):
        return name in self._overrides or series_level(name) is not None

    def replace(self, name, series):
        """Copy of the store in which ``name`` is the given series (tail bound 0)."""
        clone = copy.copy(self)
        clone._holonomies = dict(self._holonomies)
        clone._overrides = dict(self._overrides)
        clone._overrides[name] = series
        return clone

    def holonomy(self, name, degree):
        if name in self._overrides:
            series = self._overrides[name]
            return Holonomy(series.truncate(degree), series.ctx.mpf(0), {"override": True})
        level = series_level(name)
        if level is None:
            raise KeyError(name)
        held = self._holonomies.get(name)
        if held is None or held.series.degree < degree:
            held = self._load_or_compute(name, level, max(degree, self._minimum_degree(level)))
            self._holonomies[name] = held
        if held.series.degree == degree:
            return held
        return Holonomy(
            held.series.truncate(degree), held.tail_bound, dict(held.metadata, degree=degree)
        )

    def _minimum_degree(self, level):
        if self.compute_degrees is None:
            return default_compute_degree(level)
        return self.compute_degrees.get(level, 0)

    def series(self, name, degree):
        return self.holonomy(name, degree).series

    def tail_bound(self, name, degree):
        return self.holonomy(name, degree).tail_bound

    def _series_params(self, name, degree):
        return {
            "series": name,
            "degree": degree,
            "precision_bits": self.prec,
            "terms": self.terms,
            "point": str(self.point),
        }

    def _load_or_compute(self, name, level, degree):
        params = self._series_params(name, degree)
        alphabet = cyclotomic_alphabet(level)
        if self.cache is not None:
            payload = self.cache.get("series", params)
            if payload is not None:
                try:
                    return _holonomy_from_document(payload, alphabet, degree, self.prec)
                except SeriesFormatError as exc:
                    logger.warning("cached series rejected", extra={"data": {"error": str(exc)}})
        if name == "PhiHalf":
            held = phi_half_holonomy(degree, self.prec, self.terms)
        else:
            held = psi_holonomy(level, degree, self.prec, self.terms, self.point)
        if self.cache is not None:
            self.cache.put("series", params, to_document(held.series, held.metadata))
        return held

    def table(self, degree):
        """The normal-form table of ``U(t4)``, built to at least ``degree``."""
        if self._table is None or self._table.max_degree < degree:
            self._table = self._load_or_build_table(degree)
        return self._table

    def _load_or_build_table(self, degree):
        params = {"degree": degree, "generators": list(T4.names), "format": TABLE_FORMAT}
        if self.cache is not None:
            payload = self.cache.get("t4table", params)
            if payload is not None:
                try:
                    return NormalFormTable.from_document(payload, degree)
                except SeriesFormatError as exc:
                    logger.warning("cached table rejected", extra={"data": {"error": str(exc)}})
        table = build_normal_forms(degree, self.max_words)
        if self.cache is not None:
            self.cache.put("t4table", params, table.to_document())
        return table


def _holonomy_from_document(payload, alphabet, degree, prec):
    series = deserialize(payload, alphabet)
    if series.degree != degree or series.prec != prec:
        raise SeriesFormatError(f"cached series has d={series.degree} P={series.prec}")
    metadata = payload.get("metadata", {})
    bound = scalar_context(prec).mpf(metadata.get("tail_bound", "0"))
    return Holonomy(series, bound, metadata)


class _SeriesView(Mapping):
    """Read-only ``name -> Series`` view of a store at one degree."""

    def __init__(self, store, degree):
        self.store = store
        self.degree = degree

    def __getitem__(self, name):
        if not self.store.knows(name):
            raise KeyError(name)
        return self.store.series(name, self.degree)

    def __iter__(self):
        return iter(self.store.names())

    def __len__(self):
        return len(self.store.names())


class _TableBackends(Mapping):
    """Backends by alphabet name; the table is only built when ``t4`` is asked for."""

    def __init__(self, store, degree):
        self.store = store
        self.degree = degree

    def __getitem__(self, name):
        if name != T4.name:
            raise KeyError(name)
        return self.store.table(self.degree)

    def __iter__(self):
        return iter((T4.name,))

    def __len__(self):
        return 1


@functools.lru_cache(maxsize=None)
def catalogue_maps():
    """Named maps usable in relation text.

    The level-4 symmetries keep their short names, level 2 adds ``sigma`` and
    ``rho``, level 1 adds ``theta``; rotations and inversions carry their level
    (``rotation4``, ``inversion2``, ...).  Distribution maps are ``dNd``/``pNd``.
    """
    maps = {}
    for N in (4, 2, 1):
        for name, m in named_automorphisms(N).items():
            if name in ("rotation", "inversion"):
                name = f"{name}{N}"
            maps[name] = m
    maps.update(distribution_maps(4))
    maps.update(distribution_maps(2))
    return maps


def eval_context(store, degree):
    return EvalContext(
        series=_SeriesView(store, degree),
        maps=catalogue_maps(),
        alphabets=CATALOGUE_ALPHABETS,
        degree=degree,
        prec=store.prec,
        backends=_TableBackends(store, degree),
        default_alphabet=F2,
    )


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


@dataclass
class ReportRow:
    """Outcome of one relation; ``residual`` is ``max |coeff(LHS RHS^-1 - 1)|``."""

    name: str
    algebra: str
    degree: int
    precision_bits: int
    terms: int
    residual: object
    residual_by_degree: tuple
    tolerance: float
    tail_bound: object
    notes: dict = field(default_factory=dict)
    wall_time: float = field(default=0.0, compare=False)

    @property
    def group(self):
        return self.name.split("@", 1)[0]

    @property
    def reading(self):
        return self.name.split("@", 1)[1] if "@" in self.name else None

    @property
    def passed(self):
        return self.residual <= self.tolerance

    def to_document(self):
        return {
            "name": self.name,
            "algebra": self.algebra,
            "degree": self.degree,
            "precision_bits": self.precision_bits,
            "terms": self.terms,
            "residual": _decimal(self.precision_bits, self.residual),
            "residual_by_degree": [
                _decimal(self.precision_bits, v) for v in self.residual_by_degree
            ],
            "tolerance": self.tolerance,
            "tail_bound": _decimal(self.precision_bits, self.tail_bound),
            "passed": self.passed,
            "notes": self.notes,
        }

    @classmethod
    def from_document(cls, document, wall_time=0.0):
        try:
            prec = int(document["precision_bits"])
            ctx = scalar_context(prec)
            return cls(
                name=document["name"],
                algebra=document["algebra"],
                degree=int(document["degree"]),
                precision_bits=prec,
                terms=int(document["terms"]),
                residual=ctx.mpf(document["residual"]),
                residual_by_degree=tuple(ctx.mpf(v) for v in document["residual_by_degree"]),
                tolerance=float(document["tolerance"]),
                tail_bound=ctx.mpf(document["tail_bound"]),
                notes=dict(document.get("notes", {})),
                wall_time=wall_time,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SeriesFormatError(f"malformed report row: {exc}") from exc


@dataclass
class VerificationReport:
    """Rows sorted by name, plus the outcome of every ``base@reading`` group.

    A group passes when exactly one of its readings passes.  Wall times and the
    creation time live under ``metadata`` so the rest of the document is
    reproducible.
    """

    rows: list
    settings: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = sorted(self.rows, key=lambda row: row.name)

    def row(self, name):
        for row in self.rows:
            if row.name == name:
                return row
        raise KeyError(name)

    def groups(self):
        outcomes = {}
        for row in self.rows:
            if row.reading is None:
                continue
            entry = outcomes.setdefault(row.group, {"readings": {}})
            entry["readings"][row.reading] = row.passed
        for entry in outcomes.values():
            passing = [reading for reading, ok in entry["readings"].items() if ok]
            entry["passed"] = len(passing) == 1
            entry["reading"] = passing[0] if len(passing) == 1 else None
        return outcomes

    @property
    def passed(self):
        singles = all(row.passed for row in self.rows if row.reading is None)
        return singles and all(entry["passed"] for entry in self.groups().values())

    def failures(self):
        failed = [row.name for row in self.rows if row.reading is None and not row.passed]
        failed += [name for name, entry in self.groups().items() if not entry["passed"]]
        return sorted(failed)

    def to_document(self, include_metadata=True):
        document = {
            "format": REPORT_FORMAT,
            "settings": self.settings,
            "rows": [row.to_document() for row in self.rows],
            "groups": self.groups(),
            "passed": self.passed,
        }
        if include_metadata:
            document["metadata"] = self.metadata
        return document

    def serialize(self, include_metadata=True):
        return json.dumps(self.to_document(include_metadata), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_document(cls, document):
        if isinstance(document, str):
            try:
                document = json.loads(document)
            except json.JSONDecodeError as exc:
                raise SeriesFormatError(f"not a JSON document: {exc}") from exc
        if not isinstance(document, dict) or document.get("format") != REPORT_FORMAT:
            raise SeriesFormatError("not a verification report document")
        metadata = dict(document.get("metadata", {}))
        times = metadata.get("wall_time", {})
        try:
            rows = [ReportRow.from_document(row, times.get(row["name"], 0.0))
                    for row in document["rows"]]
        except (KeyError, TypeError) as exc:
            raise SeriesFormatError(f"malformed report: {exc}") from exc
        return cls(rows, dict(document.get("settings", {})), metadata)

    def render_text(self):
        header = (
            f"{'relation':<32} {'algebra':<7} {'d':>2} "
            f"{'residual':>10} {'tolerance':>10} {'bound':>10}  status"
        )
        lines = [header, "-" * len(header)]
        for row in self.rows:
            ctx = scalar_context(row.precision_bits)
            lines.append(
                f"{row.name:<32} {row.algebra:<7} {row.degree:>2} "
                f"{ctx.nstr(row.residual, 3):>10} {row.tolerance:>10.1e} "
                f"{ctx.nstr(row.tail_bound, 3):>10}  {'pass' if row.passed else 'FAIL'}"
            )
        for name, entry in sorted(self.groups().items()):
            readings = ", ".join(
                f"{reading}={'pass' if ok else 'fail'}"
                for reading, ok in sorted(entry["readings"].items())
            )
            verdict = f"holds as {entry['reading']}" if entry["passed"] else "FAIL"
            lines.append(f"group {name}: {readings} -> {verdict}")
        outcome = "all relations hold" if self.passed else "FAILED: " + ", ".join(self.failures())
        lines.append(f"{len(self.rows)} rows, {outcome}")
        return "\n".join(lines) + "\n"


def _row(store, name, residual, degree, tolerance, inputs, started, notes=None):
    norms = residual_by_degree(residual)
    bound = residual.ctx.mpf(0)
    for input_name in sorted(inputs):
        bound += store.tail_bound(input_name, degree)
    row = ReportRow(
        name=name,
        algebra=residual.alphabet.name,
        degree=degree,
        precision_bits=store.prec,
        terms=store.terms,
        residual=max(norms),
        residual_by_degree=tuple(norms),
        tolerance=tolerance,
        tail_bound=bound,
        notes=notes or {},
        wall_time=time.perf_counter() - started,
    )
    _log_row(row)
    return row


def _check_row(store, name, holds, degree, tolerance, started, notes, algebra="-"):
    zero = scalar_context(store.prec).mpf(0)
    row = ReportRow(
        name=name,
        algebra=algebra,
        degree=degree,
        precision_bits=store.prec,
        terms=store.terms,
        residual=zero if holds else zero + 1,
        residual_by_degree=(),
        tolerance=tolerance,
        tail_bound=zero,
        notes=notes,
        wall_time=time.perf_counter() - started,
    )
    _log_row(row)
    return row


def _log_row(row):
    logger.log(
        logging.INFO if row.passed else logging.WARNING,
        "relation checked",
        extra={
            "data": {
                "relation": row.name,
                "degree": row.degree,
                "residual": scalar_context(row.precision_bits).nstr(row.residual, 6),
                "tolerance": row.tolerance,
                "passed": row.passed,
            }
        },
    )


def _settings(name, degree, tolerance):
    degree = relation_degree(name) if degree is None else degree
    tolerance = relation_tolerance(name) if tolerance is None else tolerance
    return degree, tolerance


# ---------------------------------------------------------------------------
# hard-coded residuals
# ---------------------------------------------------------------------------


def _power(base, alphabet, combination, degree, prec, backend=FREE):
    return scalar_power(base, Series.lie(alphabet, combination, degree, prec, backend))


def _product(*factors):
    return functools.reduce(mul, factors)


def _residual(lhs, rhs):
    return mul(lhs, inverse(rhs))


def _substitution(domain, codomain, images, backend=FREE):
    return GeneratorMap.linear(domain, codomain, images, backend)


TWO_OVER_I = sympy.expand(2 / sympy.I)
_SWAP = {"A": {"B": 1}, "B": {"A": 1}}


def hexagon_residual(store, degree):
    psi4 = store.series("Psi4", degree)
    maps, prec = catalogue_maps(), store.prec
    lhs = _product(
        _power(TWO_OVER_I, F5, {"A": 1}, degree, prec),
        apply_hom(maps["s2"], psi4),
        _power(TWO_OVER_I, F5, {"bi": 1}, degree, prec),
        apply_hom(maps["s"], psi4),
        _power(TWO_OVER_I, F5, {"b1": 1}, degree, prec),
        psi4,
    )
    return _residual(lhs, Series.one(F5, degree, prec))


def okuda_residual(store, degree):
    psi4 = store.series("Psi4", degree)
    prec = store.prec
    lhs = apply_hom(catalogue_maps()["st"], psi4)
    rhs = _product(
        _power(2, F5, {"A": -1}, degree, prec),
        inverse(psi4),
        _power(2, F5, {"b1": -1}, degree, prec),
    )
    return _residual(lhs, rhs)


def octogon_residual(store, degree):
    psi4 = store.series("Psi4", degree)
    maps, prec = catalogue_maps(), store.prec
    lhs = _product(
        inverse(psi4),
        _power(sympy.I, F5, {"b1": 2}, degree, prec),
        apply_hom(maps["st2sinv"], psi4),
        _power(sympy.I, F5, {"C": 1}, degree, prec),
        apply_hom(maps["sinvtsinv"], inverse(psi4)),
        _power(sympy.I, F5, {"bi": 2}, degree, prec),
        apply_hom(maps["t"], psi4),
        _power(sympy.I, F5, {"A": 1}, degree, prec),
    )
    return _residual(lhs, Series.one(F5, degree, prec))


def broadhurst_residual(store, degree):
    psi2 = store.series("Psi2", degree)
    prec = store.prec
    lhs = apply_hom(catalogue_maps()["sigma"], psi2)
    rhs = _product(
        _power(2, F3, {"A": -1}, degree, prec),
        inverse(psi2),
        _power(2, F3, {"b1": -1}, degree, prec),
    )
    return _residual(lhs, rhs)


def delta42_residual(store, degree):
    lhs = apply_hom(catalogue_maps()["d42"], store.series("Psi4", degree))
    return _residual(lhs, store.series("Psi2", degree))


def pi42_residual(store, degree):
    lhs = apply_hom(catalogue_maps()["p42"], store.series("Psi4", degree))
    rhs = mul(_power(2, F3, {"b1": 1}, degree, store.prec), store.series("Psi2", degree))
    return _residual(lhs, rhs)


def delta41_residual(store, degree):
    lhs = apply_hom(catalogue_maps()["d41"], store.series("Psi4", degree))
    return _residual(lhs, store.series("Phi", degree))


def pi41_phi_residual(store, degree):
    lhs = apply_hom(catalogue_maps()["p41"], store.series("Psi4", degree))
    rhs = mul(_power(4, F2, {"B": 1}, degree, store.prec), store.series("Phi", degree))
    return _residual(lhs, rhs)


def pi42_phi_residual(store, degree):
    lhs = apply_hom(catalogue_maps()["p42"], store.series("Psi4", degree))
    phi = apply_hom(
        _substitution(F2, F3, {"A": {"A": 1}, "B": {"b1": 1}}), store.series("Phi", degree)
    )
    rhs = mul(_power(4, F3, {"b1": 1}, degree, store.prec), phi)
    return _residual(lhs, rhs)


def _ns_residual(store, degree, base, scale):
    psi2 = store.series("Psi2", degree)
    images = {"A": {"A": 1}, "b1": {"B": scale}, "bm1": {"A": -scale, "B": -scale}}
    rhs = _product(
        _power(base, F2, {"B": 1}, degree, store.prec),
        apply_hom(_substitution(F3, F2, images), psi2),
        _power(base, F2, {"A": 1}, degree, store.prec),
    )
    return _residual(store.series("Phi", degree), rhs)


def ns1_residual(store, degree):
    return _ns_residual(store, degree, 2, 1)


def ns2_residual(store, degree):
    return _ns_residual(store, degree, 4, 2)


def phi_duality_residual(store, degree):
    phi = store.series("Phi", degree)
    lhs = mul(apply_hom(_substitution(F2, F2, _SWAP), phi), phi)
    return _residual(lhs, Series.one(F2, degree, store.prec))


def phi_half_residual(store, degree):
    half = store.series("PhiHalf", degree)
    rhs = mul(inverse(apply_hom(_substitution(F2, F2, _SWAP), half)), half)
    return _residual(store.series("Phi", degree), rhs)


def t4_residual(store, degree):
    table = store.table(degree)
    prec = store.prec

    def embedded(name, domain, images):
        return embed(embedding(domain, images, table), store.series(name, degree))

    lhs = embedded("Psi2", F3, {"A": {"t12": 1, "t34": 1}, "b1": {"t23": 1}, "bm1": {"t14": 1}})
    rhs = _product(
        _power(2, T4, {"Z": 1, "t23": -1}, degree, prec, table),
        embedded("PhiHalf", F2, {"A": {"t12": 1, "t13": 1}, "B": {"t24": 1, "t34": 1}}),
        embedded("Phi", F2, {"A": {"t12": 1}, "B": {"t23": 1}}),
        inverse(embedded("Phi", F2, {"A": {"t13": 1, "t23": 1}, "B": {"t34": 1}})),
    )
    return _residual(lhs, rhs)


# name -> (residual function, associators it reads)
BUILTIN_RESIDUALS = {
    "hexagon-psi4": (hexagon_residual, ("Psi4",)),
    "okuda-psi4": (okuda_residual, ("Psi4",)),
    "octogon-psi4": (octogon_residual, ("Psi4",)),
    "broadhurst-psi2": (broadhurst_residual, ("Psi2",)),
    "distributivity-delta42": (delta42_residual, ("Psi4", "Psi2")),
    "distributivity-pi42": (pi42_residual, ("Psi4", "Psi2")),
    "distributivity-delta41": (delta41_residual, ("Psi4", "Phi")),
    "distributivity-pi-phi@pi41": (pi41_phi_residual, ("Psi4", "Phi")),
    "distributivity-pi-phi@pi42": (pi42_phi_residual, ("Psi4", "Phi")),
    "ns1": (ns1_residual, ("Phi", "Psi2")),
    "ns2": (ns2_residual, ("Phi", "Psi2")),
    "phi-duality": (phi_duality_residual, ("Phi",)),
    "phi-half": (phi_half_residual, ("Phi", "PhiHalf")),
    "t4-relation": (t4_residual, ("Psi2", "Phi", "PhiHalf")),
}


def residual_modulo_center(g):
    """Residual of ``g`` after removing a central factor ``exp(lambda Z)``.

    In the degree-one part of ``U(t4)`` the centre is spanned by
    ``Z = t12 + t13 + t14 + t23 + t24 + t34``, the all-ones vector in the generator
    basis.  ``lambda Z`` is the orthogonal projection of the linear part of
    ``log g`` onto that line, so ``lambda`` is the mean of the six degree-one
    coefficients.  The residual of ``g exp(-lambda Z)`` is returned.  It stays small
    when a U(t4) relation holds up to a central factor, such as a different
    normalisation of ``2^{Z}``.
    """
    if g.degree < 1:
        return max(residual_by_degree(g))
    linear = log(g).homogeneous(1)
    mean = sum(linear) / len(linear)
    z = Series.lie(g.alphabet, {"Z": 1}, g.degree, g.prec, g.backend)
    return max(residual_by_degree(mul(g, exp(z * (-mean)))))


def _t4_notes(store, residual, degree):
    ctx = residual.ctx
    table = store.table(degree)
    return {
        "residual_mod_center": ctx.nstr(residual_modulo_center(residual), 6),
        "center_defect": table.central_defect(),
    }


def verify_builtin(name, store, degree=None, tolerance=None):
    """Run the hard-coded verifier registered under ``name``."""
    function, inputs = BUILTIN_RESIDUALS[name]
    degree, tolerance = _settings(name, degree, tolerance)
    started = time.perf_counter()
    residual = function(store, degree)
    notes = _t4_notes(store, residual, degree) if name.startswith("t4-") else None
    return _row(store, name, residual, degree, tolerance, inputs, started, notes)


def verify_hexagon_psi4(store, degree=None, tolerance=None):
    return verify_builtin("hexagon-psi4", store, degree, tolerance)


def verify_okuda(store, degree=None, tolerance=None):
    return verify_builtin("okuda-psi4", store, degree, tolerance)


def verify_octogon(store, degree=None, tolerance=None):
    return verify_builtin("octogon-psi4", store, degree, tolerance)


def verify_broadhurst(store, degree=None, tolerance=None):
    return verify_builtin("broadhurst-psi2", store, degree, tolerance)


def verify_distributivity(store, degree=None, tolerance=None):
    """The four distribution rows, the disputed pi line under both readings."""
    names = [name for name in BUILTIN_RESIDUALS if name.startswith("distributivity-")]
    return [verify_builtin(name, store, degree, tolerance) for name in names]


def verify_ns1(store, degree=None, tolerance=None):
    return verify_builtin("ns1", store, degree, tolerance)


def verify_ns2(store, degree=None, tolerance=None):
    return verify_builtin("ns2", store, degree, tolerance)


def verify_phi_duality(store, degree=None, tolerance=None):
    return verify_builtin("phi-duality", store, degree, tolerance)


def verify_phi_half(store, degree=None, tolerance=None):
    return verify_builtin("phi-half", store, degree, tolerance)


def verify_t4_relation(store, degree=None, tolerance=None):
    return verify_builtin("t4-relation", store, degree, tolerance)


# ---------------------------------------------------------------------------
# suite checks beyond the catalogue
# ---------------------------------------------------------------------------


def verify_grouplike(name, store, degree=None, tolerance=None):
    """Shuffle-character defect of the associator named after ``grouplike-``."""
    target = {"grouplike-phi": "Phi", "grouplike-psi2": "Psi2", "grouplike-psi4": "Psi4"}[name]
    degree, tolerance = _settings(name, degree, tolerance)
    started = time.perf_counter()
    series = store.series(target, degree)
    defect = grouplike_residual(series)
    row = ReportRow(
        name=name,
        algebra=series.alphabet.name,
        degree=degree,
        precision_bits=store.prec,
        terms=store.terms,
        residual=defect,
        residual_by_degree=(),
        tolerance=tolerance,
        tail_bound=store.tail_bound(target, degree),
        wall_time=time.perf_counter() - started,
    )
    _log_row(row)
    return row


def verify_automorphism_presentation(store, degree=None, tolerance=None):
    name = "automorphism-presentation"
    degree, tolerance = _settings(name, degree, tolerance)
    started = time.perf_counter()
    checks = presentation_checks()
    return _check_row(store, name, all(checks.values()), degree, tolerance, started,
                      {"checks": checks})


def verify_t4_presentation(store, degree=None, tolerance=None):
    """Exact ``U(t4)`` dimensions against the Hilbert series and exact centrality of ``Z``."""
    name = "t4-presentation"
    degree, tolerance = _settings(name, degree, tolerance)
    started = time.perf_counter()
    table = store.table(degree)
    dimensions = table.dimensions()[: degree + 1]
    expected = hilbert_dimensions(degree)
    defect = table.central_defect()
    notes = {"dimensions": dimensions, "hilbert": expected, "center_defect": defect}
    holds = dimensions == expected and defect == 0
    return _check_row(store, name, holds, degree, tolerance, started, notes, T4.name)


# u = 2z/(z+1) and u = 4z/(z+1)^2 pull the KZ connection back to these
CONNECTION_CHANGES = {
    "ns1-connection": ({0: "A", 1: "B", -1: {"A": -1, "B": -1}}, 2),
    "ns2-connection": ({0: "A", 1: {"B": 2}, -1: {"A": -2, "B": -2}}, 4),
}


def verify_connection_change(name, store, degree=None, tolerance=None):
    """Holonomy of a pulled-back connection against ``base^-B Phi base^-A``."""
    poles, base = CONNECTION_CHANGES[name]
    degree, tolerance = _settings(name, degree, tolerance)
    started = time.perf_counter()
    connection = ConnectionData.from_poles(F2, poles)
    held = renormalized_holonomy(connection, degree, store.prec, store.terms, store.point)
    rhs = _product(
        _power(base, F2, {"B": -1}, degree, store.prec),
        store.series("Phi", degree),
        _power(base, F2, {"A": -1}, degree, store.prec),
    )
    row = _row(store, name, _residual(held.series, rhs), degree, tolerance, ("Phi",), started)
    row.tail_bound += held.tail_bound
    return row


# name -> (level used by `verify --N`, check)
SUITE_CHECKS = {
    "grouplike-phi": (1, functools.partial(verify_grouplike, "grouplike-phi")),
    "grouplike-psi2": (2, functools.partial(verify_grouplike, "grouplike-psi2")),
    "grouplike-psi4": (4, functools.partial(verify_grouplike, "grouplike-psi4")),
    "automorphism-presentation": (4, verify_automorphism_presentation),
    "t4-presentation": (2, verify_t4_presentation),
    "ns1-connection": (2, functools.partial(verify_connection_change, "ns1-connection")),
    "ns2-connection": (2, functools.partial(verify_connection_change, "ns2-connection")),
}


# ---------------------------------------------------------------------------
# catalogue
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelationSpec:
    """A catalogue relation with the associators and maps it needs."""

    relation: object
    series: tuple
    maps: tuple

    @classmethod
    def from_relation(cls, relation):
        series, maps = referenced_names(relation)
        return cls(relation, tuple(sorted(series)), tuple(sorted(maps)))

    @property
    def name(self):
        return self.relation.full_name

    @property
    def group(self):
        return self.relation.name

    @property
    def level(self):
        levels = [series_level(name) for name in self.series]
        return max((level for level in levels if level is not None), default=1)


def catalogue_text(path=None):
    if path is None:
        return resources.files("kzassoc").joinpath("catalogue", CATALOGUE_RESOURCE).read_text(
            encoding="utf-8"
        )
    return Path(path).read_text(encoding="utf-8")


def load_catalogue(path=None):
    """Relation specs of a catalogue file (the shipped catalogue by default)."""
    return [RelationSpec.from_relation(r) for r in parse_catalogue(catalogue_text(path))]


def verify_relation(spec, store, degree=None, tolerance=None):
    """Evaluate one catalogue relation with the DSL engine."""
    degree, tolerance = _settings(spec.name, degree, tolerance)
    started = time.perf_counter()
    residual = bind_and_eval(spec.relation, eval_context(store, degree))
    notes = None
    if isinstance(residual.backend, NormalFormTable):
        notes = _t4_notes(store, residual, degree)
    inputs = [name for name in spec.series if store.knows(name)]
    return _row(store, spec.name, residual, degree, tolerance, inputs, started, notes)


def _matches(name, selection):
    return not selection or name in selection or name.split("@", 1)[0] in selection


def _check_selection(selection, known):
    bases = {name.split("@", 1)[0] for name in known}
    unknown = sorted(set(selection) - set(known) - bases)
    if unknown:
        raise ConfigError(f"unknown relation(s): {', '.join(unknown)}")


@trace(ignore_params=["store"])
def verify_all(config, store=None, level=None):
    """Run the catalogue (and, for the shipped catalogue, the suite checks).

    ``level`` restricts the run to relations whose highest associator level is
    ``level``; ``config.relations`` restricts it to the named relations or groups.
    """
    store = store or AssociatorStore.from_config(config)
    specs = load_catalogue(config.catalogue)
    checks = SUITE_CHECKS if config.catalogue is None else {}
    _check_selection(config.relations, [s.name for s in specs] + list(checks))
    started = time.perf_counter()
    rows = []
    for spec in specs:
        if not _matches(spec.name, config.relations):
            continue
        if level is not None and not config.relations and spec.level != level:
            continue
        degree, tolerance = config.degree_for(spec.name), config.tolerance_for(spec.name)
        rows.append(verify_relation(spec, store, degree, tolerance))
    for name, (check_level, check) in checks.items():
        if not _matches(name, config.relations):
            continue
        if level is not None and not config.relations and check_level != level:
            continue
        rows.append(check(store, config.degree_for(name), config.tolerance_for(name)))
    settings = {
        "precision_bits": store.prec,
        "terms": store.terms,
        "point": str(store.point),
        "catalogue": str(config.catalogue) if config.catalogue else CATALOGUE_RESOURCE,
    }
    metadata = {
        "created": datetime.now(timezone.utc).isoformat(),
        "wall_time": {row.name: round(row.wall_time, 3) for row in rows},
        "total_wall_time": round(time.perf_counter() - started, 3),
    }
    report = VerificationReport(rows, settings, metadata)
    logger.info(
        "verification finished",
        extra={"data": {"rows": len(report.rows), "passed": report.passed,
                        "failures": report.failures()}},
    )
    return report


# ---------------------------------------------------------------------------
# fault injection and oracle comparison
# ---------------------------------------------------------------------------


def flip_largest_coefficient(series, degree):
    """Copy of ``series`` with the largest degree-``degree`` coefficient negated."""
    array = series.homogeneous(degree)
    code = max(range(len(array)), key=lambda c: abs(array[c]))
    word = series.alphabet.word(code, degree)
    return series.with_coefficient(word, -array[code])


def oracle_comparison(N, degree, store, epsilon=1e-7, steps=2000):
    """``(word, taylor, oracle, |difference|)`` for every word up to ``degree``.

    Values are compared at double precision since the oracle runs at 64 bits.
    """
    taylor = store.series(f"Psi{N}" if N > 1 else "Phi", degree)
    oracle = ode_oracle_psi(N, degree, epsilon=epsilon, steps=steps)
    rows = []
    for k in range(degree + 1):
        for word in taylor.alphabet.words(k):
            a, b = complex(taylor.coeff(word)), complex(oracle.coeff(word))
            rows.append((" ".join(word) or "1", a, b, abs(a - b)))
    return rows


__all__ = [
    "BUILTIN_RESIDUALS",
    "CATALOGUE_ALPHABETS",
    "SUITE_CHECKS",
    "AssociatorStore",
    "RelationSpec",
    "ReportRow",
    "VerificationReport",
    "catalogue_maps",
    "eval_context",
    "flip_largest_coefficient",
    "load_catalogue",
    "oracle_comparison",
    "residual_modulo_center",
    "verify_all",
    "verify_automorphism_presentation",
    "verify_broadhurst",
    "verify_builtin",
    "verify_connection_change",
    "verify_distributivity",
    "verify_grouplike",
    "verify_hexagon_psi4",
    "verify_ns1",
    "verify_ns2",
    "verify_octogon",
    "verify_okuda",
    "verify_phi_duality",
    "verify_phi_half",
    "verify_relation",
    "verify_t4_presentation",
    "verify_t4_relation",
]
