"""
Renormalized holonomies of Fuchsian connections on the interval ]0, 1[.

For a connection ``(dH)H^-1 = sum_p g_p dz/(z - p)`` with poles at ``0`` and ``1``
(and possibly elsewhere, off the interval) the renormalized holonomy is
``H1^-1 H0`` where ``H0 ~ z**g_0`` at ``0+`` and ``H1 ~ (1-z)**g_1`` at ``1-``.
Both solutions are expanded at their basepoint as ``P(w) w**E`` and the regular
part ``P`` is produced by an exact Taylor recursion; the two expansions meet at
an interior point (``1/2`` by default).

Typical use::

    psi4 = compute_psi(4, degree=4, prec=192, terms=120)
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .config import (
    DEFAULT_POINT,
    DEFAULT_PRECISION_BITS,
    DEFAULT_TERMS,
    MIN_PRECISION_BITS,
    default_compute_degree,
)
from .decorators import trace
from .errors import ContractViolation, DomainError
from .ncseries import (
    Alphabet,
    Series,
    coefficient_norm,
    exact,
    inverse,
    mul,
    scalar_context,
    scalar_power,
    to_scalar,
)

logger = logging.getLogger(__name__)

ORACLE_MAX_DEGREE = 3


# ---------------------------------------------------------------------------
# cyclotomic alphabets
# ---------------------------------------------------------------------------


def root_of_unity(N, k):
    """Exact ``exp(2*pi*i*k/N)``; Gaussian roots come out as ``1, I, -1, -I``."""
    return sympy.exp(2 * sympy.pi * sympy.I * sympy.Rational(k % N, N))


def root_generator_name(N, k):
    k %= N
    if N == 1:
        return "B"
    if k == 0:
        return "b1"
    if 2 * k == N:
        return "bm1"
    if 4 * k == N:
        return "bi"
    if 4 * k == 3 * N:
        return "bmi"
    return f"b{k}_{N}"


def cyclotomic_alphabet(N):
    """Alphabet of ``f_{N+1}``: ``A`` then ``b[zeta]`` for ``zeta = exp(2 pi i k/N)``.

    The alias ``C`` stands for ``-A - sum b[zeta]``.  For ``N = 1`` the single root
    generator is called ``B``.
    """
    if N < 1:
        raise ContractViolation(f"N must be a positive integer, got {N}")
    names = ["A"] + [root_generator_name(N, k) for k in range(N)]
    return Alphabet(f"f{N + 1}", names, {"C": {name: -1 for name in names}})


# ---------------------------------------------------------------------------
# connections
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConnectionData:
    """Poles and residues of ``sum_p g_p dz/(z - p)`` over ``alphabet``.

    ``poles`` is a tuple of ``(point, residue)`` with exact sympy points and
    residues given as normalized linear forms of the alphabet.
    """

    alphabet: Alphabet
    poles: tuple
    N: int = None

    @classmethod
    def cyclotomic(cls, N):
        """The connection ``A/z + sum_zeta b[zeta]/(z - zeta)`` of the N-th roots of unity."""
        alphabet = cyclotomic_alphabet(N)
        poles = [(sympy.Integer(0), alphabet.linear_form({"A": 1}))]
        for k in range(N):
            poles.append(
                (root_of_unity(N, k), alphabet.linear_form({root_generator_name(N, k): 1}))
            )
        return cls(alphabet, tuple(poles), N)

    @classmethod
    def from_poles(cls, alphabet, poles):
        """General connection from ``{point: {symbol: coefficient}}``.

        Example (the change of variable ``u = 2z/(z+1)`` applied to KZ)::

            ConnectionData.from_poles(f2, {0: "A", 1: "B", -1: "C"})
        """
        normalized = []
        for point, residue in dict(poles).items():
            if isinstance(residue, str):
                residue = {residue: 1}
            form = alphabet.linear_form(residue)
            if form:
                normalized.append((exact(point), form))
        points = [point for point, _ in normalized]
        if len(set(points)) != len(points):
            raise ContractViolation("pole points must be distinct")
        for point in points:
            re, im = point.as_real_imag()
            if im == 0 and 0 < re < 1:
                raise DomainError(f"pole {point} lies on the integration path ]0, 1[")
        if sympy.Integer(0) not in points or sympy.Integer(1) not in points:
            raise DomainError("the connection needs poles at 0 and 1")
        return cls(alphabet, tuple(normalized))

    def residue(self, point):
        point = exact(point)
        for candidate, form in self.poles:
            if candidate == point:
                return form
        return ()

    @property
    def roots(self):
        """Exact pole points other than 0."""
        return tuple(point for point, _ in self.poles if point != 0)

    def form_indices(self, form, ctx):
        return {self.alphabet.index(g): to_scalar(ctx, c) for g, c in form}

    def label(self):
        return f"N={self.N}" if self.N is not None else f"{self.alphabet.name} connection"

    def __repr__(self):
        return f"<ConnectionData {self.label()} poles={len(self.poles)}>"


def _centers(connection, basepoint, ctx):
    """Poles seen from ``basepoint`` in the local variable (``z`` or ``1 - z``)."""
    centers = []
    for point, form in connection.poles:
        if point == basepoint:
            continue
        local = point if basepoint == 0 else 1 - point
        centers.append((to_scalar(ctx, local), connection.form_indices(form, ctx)))
    return centers


# ---------------------------------------------------------------------------
# Taylor expansions at the regular singular points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaylorExpansion:
    """Regular part ``P(w) = sum p_n w**n`` of ``H = P(w) w**E`` at a basepoint."""

    connection: ConnectionData
    basepoint: int
    exponent: dict
    centers: tuple
    coefficients: tuple
    radius: object
    norms: tuple = field(repr=False)

    @property
    def terms(self):
        return len(self.coefficients) - 1

    @property
    def degree(self):
        return self.coefficients[0].degree

    @property
    def prec(self):
        return self.coefficients[0].prec

    def local_coefficient(self, m):
        """Degree-one Taylor coefficient ``r_m`` of the non-singular connection part."""
        r = {}
        for c, form in self.centers:
            weight = -(c ** -(m + 1))
            for g, value in form.items():
                r[g] = r.get(g, 0) + weight * value
        return r

    def recursion_residual(self, max_n=12):
        """Largest defect of ``n p_n - [E, p_n] - sum r_m p_j`` for ``n <= max_n``."""
        worst = scalar_context(self.prec).mpf(0)
        for n in range(1, min(max_n, self.terms) + 1):
            p = self.coefficients[n]
            defect = p * n - _ad(p, self.exponent)
            for m in range(n):
                defect = defect - self.coefficients[n - 1 - m].left_mul_linear(
                    self.local_coefficient(m)
                )
            worst = max(worst, coefficient_norm(defect))
        return worst

    def scaled_norm_bound(self):
        """``max_n |p_n| radius**n``, the constant of the geometric tail model."""
        return max(norm * self.radius**n for n, norm in enumerate(self.norms))


def _ad(x, form):
    if not form:
        return x * 0
    return x.left_mul_linear(form) - x.right_mul_linear(form)


def _expand(connection, basepoint, degree, prec, terms):
    if prec < MIN_PRECISION_BITS:
        raise ContractViolation(f"precision must be at least {MIN_PRECISION_BITS} bits")
    if degree < 0 or terms < 1:
        raise ContractViolation(f"need degree >= 0 and terms >= 1, got {degree}, {terms}")
    ctx = scalar_context(prec)
    alphabet = connection.alphabet
    exponent = connection.form_indices(connection.residue(basepoint), ctx)
    centers = _centers(connection, basepoint, ctx)
    radius = min(abs(c) for c, _ in centers) if centers else ctx.inf

    one = Series.one(alphabet, degree, prec)
    coefficients = [one]
    running = [one * 0 for _ in centers]
    for n in range(1, terms + 1):
        rhs = one * 0
        for position, (c, form) in enumerate(centers):
            running[position] = (running[position] + coefficients[n - 1]) / c
            rhs = rhs - running[position].left_mul_linear(form)
        # (n - ad_E)^-1 as a finite Neumann sum: ad_E raises the degree
        term = rhs / n
        p = term
        for _ in range(1, degree):
            term = _ad(term, exponent) / n
            p = p + term
        coefficients.append(p)

    norms = tuple(coefficient_norm(p) for p in coefficients)
    expansion = TaylorExpansion(
        connection, basepoint, exponent, tuple(centers), tuple(coefficients), radius, norms
    )
    logger.debug(
        "taylor expansion ready",
        extra={
            "data": {
                "connection": connection.label(),
                "basepoint": basepoint,
                "degree": degree,
                "terms": terms,
                "radius": ctx.nstr(radius, 8),
                "last_norm": ctx.nstr(norms[-1], 8),
            }
        },
    )
    return expansion


@trace(ignore_params=["connection"])
def taylor_at_zero(N, degree, terms, prec, connection=None):
    """Expansion of the solution ``H0 = P(z) z**A`` at ``z = 0``."""
    return _expand(connection or ConnectionData.cyclotomic(N), 0, degree, prec, terms)


@trace(ignore_params=["connection"])
def taylor_at_one(N, degree, terms, prec, connection=None):
    """Expansion of ``H1 = Q(1-z) (1-z)**b[1]`` in the variable ``v = 1 - z``."""
    return _expand(connection or ConnectionData.cyclotomic(N), 1, degree, prec, terms)


def evaluate_regular_part(expansion, z0, terms=None):
    """Return ``(sum_{n<=M} p_n w0**n, tail_bound)`` with ``w0`` the local variable at ``z0``.

    The bound is ``K * ratio**(M+1) / (1 - ratio)`` with ``ratio = |w0| / radius`` and
    ``K = max_n |p_n| radius**n`` over the computed coefficients.
    """
    terms = expansion.terms if terms is None else terms
    if not 0 <= terms <= expansion.terms:
        raise ContractViolation(f"expansion holds {expansion.terms} terms, asked for {terms}")
    ctx = scalar_context(expansion.prec)
    z0 = to_scalar(ctx, z0)
    w0 = z0 if expansion.basepoint == 0 else 1 - z0
    ratio = abs(w0) / expansion.radius
    if ratio >= 1:
        raise DomainError(f"point {z0} lies outside the convergence disk at {expansion.basepoint}")

    value = expansion.coefficients[0]
    power = ctx.mpc(1)
    for n in range(1, terms + 1):
        power *= w0
        value = value + expansion.coefficients[n] * power
    bound = expansion.scaled_norm_bound() * ratio ** (terms + 1) / (1 - ratio)
    return value, bound


# ---------------------------------------------------------------------------
# associators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Holonomy:
    """An associator together with its a-priori truncation error and provenance."""

    series: Series
    tail_bound: object
    metadata: dict = field(compare=False)


def _lie(alphabet, form, degree, prec):
    return Series.lie(alphabet, dict(form), degree, prec)


def _point(point):
    point = exact(point)
    if not (point.is_real and 0 < point < 1):
        raise DomainError(f"evaluation point must lie in ]0, 1[, got {point}")
    return point


@trace(ignore_params=["connection"])
def renormalized_holonomy(
    connection,
    degree,
    prec=DEFAULT_PRECISION_BITS,
    terms=DEFAULT_TERMS,
    point=DEFAULT_POINT,
):
    """``H1^-1 H0`` assembled at ``z0``: ``(1-z0)**(-g_1) Q(1-z0)^-1 P(z0) z0**g_0``."""
    point = _point(point)
    alphabet = connection.alphabet
    at_zero = _expand(connection, 0, degree, prec, terms)
    at_one = _expand(connection, 1, degree, prec, terms)
    p_value, p_bound = evaluate_regular_part(at_zero, point)
    q_value, q_bound = evaluate_regular_part(at_one, point)

    e0 = _lie(alphabet, connection.residue(0), degree, prec)
    e1 = _lie(alphabet, connection.residue(1), degree, prec)
    series = mul(
        mul(scalar_power(1 - point, -e1), inverse(q_value)),
        mul(p_value, scalar_power(point, e0)),
    )
    ctx = scalar_context(prec)
    tail_bound = p_bound + q_bound
    metadata = {
        "N": connection.N,
        "degree": degree,
        "precision_bits": prec,
        "terms": terms,
        "point": str(point),
        "tail_bound": ctx.nstr(tail_bound, 6),
    }
    logger.info("holonomy computed", extra={"data": dict(metadata, connection=connection.label())})
    return Holonomy(series, tail_bound, metadata)


def psi_holonomy(N, degree=None, prec=DEFAULT_PRECISION_BITS, terms=DEFAULT_TERMS,
                 point=DEFAULT_POINT):
    degree = default_compute_degree(N) if degree is None else degree
    return renormalized_holonomy(ConnectionData.cyclotomic(N), degree, prec, terms, point)


def compute_psi(N, degree=None, prec=DEFAULT_PRECISION_BITS, terms=DEFAULT_TERMS,
                point=DEFAULT_POINT):
    """The cyclotomic associator ``Psi_N`` over ``f_{N+1}`` truncated at ``degree``."""
    return psi_holonomy(N, degree, prec, terms, point).series


def compute_phi(degree=None, prec=DEFAULT_PRECISION_BITS, terms=DEFAULT_TERMS,
                point=DEFAULT_POINT):
    """The KZ associator ``Phi(A, B) = Psi_1(A | B)``."""
    return compute_psi(1, degree, prec, terms, point)


@trace
def phi_half_holonomy(degree=None, prec=DEFAULT_PRECISION_BITS, terms=DEFAULT_TERMS):
    """``Phi_1/2 = G0(1/2) = P(1/2) 2**-A`` for the KZ connection.

    The solution normalized at ``1/2`` is 1 there, so the point is fixed.
    """
    degree = default_compute_degree(1) if degree is None else degree
    connection = ConnectionData.cyclotomic(1)
    half = Fraction(1, 2)
    p_value, bound = evaluate_regular_part(_expand(connection, 0, degree, prec, terms), half)
    a = Series.generator(connection.alphabet, "A", degree, prec)
    series = mul(p_value, scalar_power(2, -a))
    metadata = {
        "N": 1,
        "degree": degree,
        "precision_bits": prec,
        "terms": terms,
        "point": "1/2",
        "tail_bound": scalar_context(prec).nstr(bound, 6),
    }
    return Holonomy(series, bound, metadata)


def compute_phi_half(degree=None, prec=DEFAULT_PRECISION_BITS, terms=DEFAULT_TERMS):
    return phi_half_holonomy(degree, prec, terms).series


# ---------------------------------------------------------------------------
# ODE propagator oracle
# ---------------------------------------------------------------------------


@trace(ignore_params=["connection"])
def ode_oracle_psi(N, degree, epsilon=1e-7, prec=64, steps=2000, connection=None):
    """Independent estimate ``eps**(-g_1) U(eps -> 1-eps) eps**g_0`` by RK4.

    The propagator is integrated in the logistic variable ``z = 1/(1 + e**-x)``, where
    ``dz = z(1-z) dx`` removes the endpoint singularities.  Accuracy is
    ``O(eps |log eps|**degree)`` plus the RK4 error.
    """
    if degree > ORACLE_MAX_DEGREE:
        raise ContractViolation(f"the oracle runs up to degree {ORACLE_MAX_DEGREE}")
    connection = connection or ConnectionData.cyclotomic(N)
    ctx = scalar_context(prec)
    eps = ctx.mpf(epsilon)
    if not ctx.mpf("1e-8") <= eps <= ctx.mpf("1e-4"):
        raise DomainError(f"oracle cutoff must lie in [1e-8, 1e-4], got {epsilon}")
    alphabet = connection.alphabet
    poles = [
        (to_scalar(ctx, point), connection.form_indices(form, ctx))
        for point, form in connection.poles
    ]

    def generator_form(x):
        z = 1 / (1 + ctx.exp(-x))
        form = {}
        for point, residue in poles:
            if point == 0:
                weight = 1 - z
            elif point == 1:
                weight = -z
            else:
                weight = z * (1 - z) / (z - point)
            for g, value in residue.items():
                form[g] = form.get(g, 0) + weight * value
        return form

    start = ctx.log(eps / (1 - eps))
    h = -2 * start / steps
    e0 = _lie(alphabet, connection.residue(0), degree, prec)
    e1 = _lie(alphabet, connection.residue(1), degree, prec)
    value = scalar_power(eps, e0)
    x = start
    for _ in range(steps):
        k1 = value.left_mul_linear(generator_form(x))
        middle = generator_form(x + h / 2)
        k2 = (value + k1 * (h / 2)).left_mul_linear(middle)
        k3 = (value + k2 * (h / 2)).left_mul_linear(middle)
        k4 = (value + k3 * h).left_mul_linear(generator_form(x + h))
        value = value + (k1 + k2 * 2 + k3 * 2 + k4) * (h / 6)
        x += h
    return mul(scalar_power(eps, -e1), value)


__all__ = [
    "ConnectionData",
    "Holonomy",
    "TaylorExpansion",
    "compute_phi",
    "compute_phi_half",
    "compute_psi",
    "cyclotomic_alphabet",
    "evaluate_regular_part",
    "ode_oracle_psi",
    "phi_half_holonomy",
    "psi_holonomy",
    "renormalized_holonomy",
    "root_generator_name",
    "root_of_unity",
    "taylor_at_one",
    "taylor_at_zero",
]
