"""
Degree-truncated non-commutative power series over arbitrary-precision complex scalars.

A :class:`Series` stores, for every degree ``k <= d``, a dense numpy object array of
length ``n**k`` (``n`` the alphabet size) holding mpmath scalars.  The word
``(l1, ..., lk)`` lives at index ``l1*n**(k-1) + ... + lk``, so concatenation of words
is the flattened outer product of their coefficient arrays.

Multiplication is delegated to a backend: :data:`FREE` keeps concatenations as they
are, a normal-form table (see :mod:`kzassoc.t4algebra`) reduces them to its basis.
"""

import functools
import itertools
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral

import numpy as np
import sympy
from mpmath.ctx_mp import MPContext
from mpmath.libmp import repr_dps, to_str

from .errors import ContractViolation, DomainError, SeriesFormatError

logger = logging.getLogger(__name__)

SERIES_FORMAT = "kzassoc.series/1"


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def scalar_context(prec):
    """Return the mpmath context working at ``prec`` mantissa bits.

    Contexts are shared per precision and never reconfigured after creation.
    """
    if prec < 2:
        raise ContractViolation(f"precision must be at least 2 bits, got {prec}")
    ctx = MPContext()
    ctx.prec = prec
    return ctx


def exact(value):
    """Return ``value`` as an exact sympy number (int, Fraction, str or sympy input)."""
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, str):
        return sympy.Rational(value)
    return sympy.expand(sympy.sympify(value, strict=True))


def to_scalar(ctx, value):
    """Convert an int, Fraction, sympy number or mpmath number to an mpc of ``ctx``."""
    if isinstance(value, Integral):
        return ctx.mpc(int(value))
    if isinstance(value, Fraction):
        return ctx.mpc(ctx.mpf(value.numerator) / value.denominator)
    if isinstance(value, sympy.Basic):
        re, im = value.as_real_imag()
        return ctx.mpc(_sympy_real(ctx, re), _sympy_real(ctx, im))
    return ctx.mpc(value)


def _sympy_real(ctx, value):
    if value.is_Rational:
        return ctx.mpf(int(value.p)) / int(value.q)
    digits = int(ctx.prec * 0.30103) + 15
    return ctx.mpf(str(sympy.N(value, digits)))


def _decimal(prec, value):
    return to_str(value._mpf_, repr_dps(prec))


def _zeros(ctx, size):
    return np.full(size, ctx.mpc(0), dtype=object)


def _is_zero(array):
    return not any(array)


def _frozen(array):
    array.flags.writeable = False
    return array


# ---------------------------------------------------------------------------
# alphabets and words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Alphabet:
    """Ordered generator names plus named exact linear combinations (aliases).

    Example::

        f3 = Alphabet("f3", ("A", "b1", "bm1"), {"C": {"A": -1, "b1": -1, "bm1": -1}})
    """

    name: str
    names: tuple
    aliases: tuple = ()

    def __init__(self, name, names, aliases=None):
        names = tuple(names)
        if len(set(names)) != len(names) or any(not n for n in names):
            raise ContractViolation(f"generator names must be distinct and non-empty: {names}")
        normalized = []
        for alias, combination in dict(aliases or {}).items():
            if alias in names:
                raise ContractViolation(f"alias {alias!r} shadows a generator")
            terms = []
            for generator, coefficient in dict(combination).items():
                if generator not in names:
                    raise ContractViolation(f"alias {alias!r} refers to unknown {generator!r}")
                coefficient = exact(coefficient)
                if not coefficient.is_Rational:
                    raise ContractViolation(f"alias {alias!r} needs rational coefficients")
                if coefficient != 0:
                    terms.append((generator, coefficient))
            terms.sort(key=lambda term: names.index(term[0]))
            normalized.append((alias, tuple(terms)))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "aliases", tuple(sorted(normalized)))

    @property
    def size(self):
        return len(self.names)

    @property
    def alias_map(self):
        return {alias: dict(terms) for alias, terms in self.aliases}

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise ContractViolation(f"{name!r} is not a generator of {self.name}") from None

    def knows(self, symbol):
        return symbol in self.names or symbol in self.alias_map

    def expand(self, symbol):
        """Return ``symbol`` (generator or alias) as ``{generator: coefficient}``."""
        if symbol in self.names:
            return {symbol: sympy.Integer(1)}
        aliases = self.alias_map
        if symbol in aliases:
            return dict(aliases[symbol])
        raise ContractViolation(f"{symbol!r} is neither a generator nor an alias of {self.name}")

    def linear_form(self, combination):
        """Expand ``{symbol: coefficient}`` into a normalized linear form.

        The result is a tuple of ``(generator, coefficient)`` pairs in generator
        order with exact, non-zero coefficients.
        """
        totals = {}
        for symbol, coefficient in dict(combination).items():
            coefficient = exact(coefficient)
            for generator, inner in self.expand(symbol).items():
                totals[generator] = sympy.expand(totals.get(generator, 0) + coefficient * inner)
        return tuple(
            (generator, totals[generator])
            for generator in self.names
            if generator in totals and totals[generator] != 0
        )

    def code(self, word):
        """Index of ``word`` (tuple of generator names) in its degree array."""
        n = self.size
        code = 0
        for letter in word:
            code = code * n + self.index(letter)
        return code

    def word(self, code, degree):
        letters = []
        for _ in range(degree):
            code, letter = divmod(code, self.size)
            letters.append(self.names[letter])
        return tuple(reversed(letters))

    def words(self, degree):
        return itertools.product(self.names, repeat=degree)

    def parse_word(self, word):
        """Accept a tuple of names or a space-separated string (``""`` is the unit)."""
        if isinstance(word, str):
            word = tuple(word.split())
        word = tuple(word)
        for letter in word:
            self.index(letter)
        return word


# ---------------------------------------------------------------------------
# backends
# ---------------------------------------------------------------------------


class FreeBackend:
    """Concatenation product of the free associative algebra."""

    tag = "free"
    max_degree = None

    def accepts(self, alphabet, degree):
        return True

    def reduce(self, degree, array, ctx):
        return array

    def __repr__(self):
        return "FREE"


FREE = FreeBackend()


def _check_backend(backend, alphabet, degree):
    if not backend.accepts(alphabet, degree):
        raise ContractViolation(
            f"backend {backend!r} cannot hold degree-{degree} series over {alphabet.name}"
        )


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------


class Series:
    """Immutable degree-truncated series with mpmath coefficients.

    Prefer the constructors :meth:`zero`, :meth:`one`, :meth:`from_terms` and
    :meth:`lie` to calling ``Series(...)`` with raw arrays.
    """

    __slots__ = ("alphabet", "degree", "prec", "backend", "_coeffs")

    def __init__(self, alphabet, degree, prec, coeffs, backend=FREE):
        if degree < 0:
            raise ContractViolation(f"truncation degree must be >= 0, got {degree}")
        _check_backend(backend, alphabet, degree)
        coeffs = tuple(coeffs)
        if len(coeffs) != degree + 1:
            raise ContractViolation(f"expected {degree + 1} homogeneous parts, got {len(coeffs)}")
        n = alphabet.size
        for k, array in enumerate(coeffs):
            if array.shape != (n**k,):
                raise ContractViolation(f"degree-{k} part has shape {array.shape}")
        self.alphabet = alphabet
        self.degree = degree
        self.prec = prec
        self.backend = backend
        self._coeffs = tuple(_frozen(array) for array in coeffs)

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, alphabet, degree, prec, backend=FREE):
        ctx = scalar_context(prec)
        return cls(
            alphabet,
            degree,
            prec,
            [_zeros(ctx, alphabet.size**k) for k in range(degree + 1)],
            backend,
        )

    @classmethod
    def one(cls, alphabet, degree, prec, backend=FREE):
        return cls.from_terms(alphabet, {(): 1}, degree, prec, backend)

    @classmethod
    def from_terms(cls, alphabet, terms, degree, prec, backend=FREE):
        """Build a series from ``{word: value}``; words above ``degree`` are dropped."""
        ctx = scalar_context(prec)
        coeffs = [_zeros(ctx, alphabet.size**k) for k in range(degree + 1)]
        for word, value in dict(terms).items():
            word = alphabet.parse_word(word)
            if len(word) <= degree:
                code = alphabet.code(word)
                coeffs[len(word)][code] = coeffs[len(word)][code] + to_scalar(ctx, value)
        for k in range(degree + 1):
            coeffs[k] = backend.reduce(k, coeffs[k], ctx)
        return cls(alphabet, degree, prec, coeffs, backend)

    @classmethod
    def lie(cls, alphabet, combination, degree, prec, backend=FREE):
        """Degree-one element from ``{symbol: coefficient}``, aliases expanded."""
        form = alphabet.linear_form(combination)
        return cls.from_terms(alphabet, {(g,): c for g, c in form}, degree, prec, backend)

    @classmethod
    def generator(cls, alphabet, name, degree, prec, backend=FREE):
        return cls.lie(alphabet, {name: 1}, degree, prec, backend)

    # -- access -----------------------------------------------------------

    @property
    def ctx(self):
        return scalar_context(self.prec)

    def homogeneous(self, k):
        """Read-only coefficient array of the degree-``k`` part."""
        return self._coeffs[k]

    def coeff(self, word):
        word = self.alphabet.parse_word(word)
        if len(word) > self.degree:
            return self.ctx.mpc(0)
        return self._coeffs[len(word)][self.alphabet.code(word)]

    __getitem__ = coeff

    @property
    def constant_term(self):
        return self._coeffs[0][0]

    def items(self):
        """Yield ``(word, value)`` for every non-zero coefficient, degree by degree."""
        for k, array in enumerate(self._coeffs):
            for code, value in enumerate(array):
                if value:
                    yield self.alphabet.word(code, k), value

    def is_zero(self):
        return all(_is_zero(array) for array in self._coeffs)

    def __repr__(self):
        terms = sum(1 for _ in self.items())
        return (
            f"<Series {self.alphabet.name} d={self.degree} P={self.prec} "
            f"backend={self.backend!r} nonzero={terms}>"
        )

    # -- structure --------------------------------------------------------

    def _like(self, coeffs):
        return Series(self.alphabet, self.degree, self.prec, coeffs, self.backend)

    def _check_compatible(self, other):
        if not isinstance(other, Series):
            raise ContractViolation(f"expected a Series, got {type(other).__name__}")
        if other.alphabet != self.alphabet:
            raise ContractViolation(
                f"alphabet mismatch: {self.alphabet.name} vs {other.alphabet.name}"
            )
        if other.degree != self.degree:
            raise ContractViolation(f"degree mismatch: {self.degree} vs {other.degree}")
        if other.prec != self.prec:
            raise ContractViolation(f"precision mismatch: {self.prec} vs {other.prec}")
        if other.backend is not self.backend:
            raise ContractViolation(f"backend mismatch: {self.backend!r} vs {other.backend!r}")

    def truncate(self, degree):
        if degree > self.degree:
            raise ContractViolation(f"cannot raise truncation degree {self.degree} to {degree}")
        return Series(self.alphabet, degree, self.prec, self._coeffs[: degree + 1], self.backend)

    def with_coefficient(self, word, value):
        """Copy of the series with one coefficient replaced (no reduction applied)."""
        word = self.alphabet.parse_word(word)
        coeffs = [array.copy() for array in self._coeffs]
        coeffs[len(word)][self.alphabet.code(word)] = to_scalar(self.ctx, value)
        return self._like(coeffs)

    def map_coefficients(self, function):
        return self._like([np.array([function(v) for v in a], dtype=object) for a in self._coeffs])

    # -- linear arithmetic ------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Series):
            self._check_compatible(other)
            return self._like([a + b for a, b in zip(self._coeffs, other._coeffs)])
        coeffs = list(self._coeffs)
        coeffs[0] = coeffs[0] + to_scalar(self.ctx, other)
        return self._like(coeffs)

    __radd__ = __add__

    def __neg__(self):
        return self._like([-a for a in self._coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Series):
            return mul(self, other)
        factor = to_scalar(self.ctx, other)
        return self._like([a * factor for a in self._coeffs])

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        return self * (1 / to_scalar(self.ctx, other))

    # -- products with degree-one elements ---------------------------------

    def left_mul_linear(self, form):
        """``l * self`` for ``l = sum_g form[g] * g`` (``form`` keyed by generator index)."""
        return self._mul_linear(form, left=True)

    def right_mul_linear(self, form):
        """``self * l`` for ``l = sum_g form[g] * g``."""
        return self._mul_linear(form, left=False)

    def _mul_linear(self, form, left):
        ctx = self.ctx
        n = self.alphabet.size
        coeffs = [_zeros(ctx, 1)]
        for k in range(1, self.degree + 1):
            source = self._coeffs[k - 1]
            shape = (n, n ** (k - 1)) if left else (n ** (k - 1), n)
            block = np.full(shape, ctx.mpc(0), dtype=object)
            if not _is_zero(source):
                for g, c in form.items():
                    part = source if c == 1 else source * c
                    if left:
                        block[g, :] = part
                    else:
                        block[:, g] = part
            coeffs.append(self.backend.reduce(k, block.ravel(), ctx))
        return self._like(coeffs)


# ---------------------------------------------------------------------------
# products, exp, log, inverse, scalar powers
# ---------------------------------------------------------------------------


def mul(x, y):
    """Truncated product ``x*y`` in the common backend of ``x`` and ``y``."""
    x._check_compatible(y)
    ctx = x.ctx
    n = x.alphabet.size
    nonzero_x = [not _is_zero(a) for a in x._coeffs]
    nonzero_y = [not _is_zero(a) for a in y._coeffs]
    coeffs = []
    for k in range(x.degree + 1):
        acc = _zeros(ctx, n**k)
        for i in range(k + 1):
            j = k - i
            if nonzero_x[i] and nonzero_y[j]:
                acc = acc + np.multiply.outer(x._coeffs[i], y._coeffs[j]).ravel()
        coeffs.append(x.backend.reduce(k, acc, ctx))
    return x._like(coeffs)


def _guard(series):
    return series.ctx.ldexp(1, -(series.prec - 10))


def exp(x):
    """``sum_{k<=d} x**k / k!`` for ``x`` without constant term."""
    if abs(x.constant_term) > 0:
        raise DomainError("exp needs a series with zero constant term")
    result = Series.one(x.alphabet, x.degree, x.prec, x.backend)
    for k in range(x.degree, 0, -1):
        result = 1 + mul(x, result) / k
    return result


def log(g):
    """Truncated logarithm of a series with constant term 1."""
    _require_unit_constant(g, "log")
    y = g - g.constant_term
    result = Series.zero(g.alphabet, g.degree, g.prec, g.backend)
    for k in range(g.degree, 0, -1):
        result = mul(y, Fraction(1, k) - result)
    return result


def inverse(g):
    """Truncated inverse of a series with constant term 1."""
    _require_unit_constant(g, "inverse")
    y = g - g.constant_term
    result = Series.one(g.alphabet, g.degree, g.prec, g.backend)
    for _ in range(g.degree):
        result = 1 - mul(y, result)
    return result


def _require_unit_constant(g, operation):
    if abs(g.constant_term - 1) > _guard(g):
        raise DomainError(f"{operation} needs constant term 1, got {g.constant_term}")


def principal_log(ctx, base):
    """Principal logarithm of ``base``; the base may not lie on the closed negative axis."""
    if isinstance(base, (Integral, Fraction, sympy.Basic)):
        value = exact(base)
        if value.is_finite is not True:
            raise DomainError(f"scalar power base {base} is not a finite number")
        re, im = value.as_real_imag()
        on_cut = im == 0 and re <= 0
    else:
        value = ctx.mpc(base)
        if ctx.isnan(value) or ctx.isinf(value):
            raise DomainError(f"scalar power base {base} is not a finite number")
        on_cut = value.imag == 0 and value.real <= 0
    if on_cut:
        raise DomainError(f"scalar power base {base} lies on the closed negative real axis")
    return ctx.log(to_scalar(ctx, value))


def scalar_power(base, x):
    """``base**x := exp(x * ln(base))`` with the principal logarithm."""
    return exp(x * principal_log(x.ctx, base))


# ---------------------------------------------------------------------------
# generator maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorMap:
    """Algebra homomorphism given by the images of the domain generators.

    ``images`` holds, in domain generator order, either an exact linear form over
    the codomain (tuple of ``(generator, coefficient)``) or a :class:`Series`
    without constant term.
    """

    domain: Alphabet
    codomain: Alphabet
    images: tuple
    backend: object = field(default=FREE, compare=False)
    name: str = field(default="", compare=False)

    @classmethod
    def linear(cls, domain, codomain, images, backend=FREE, name=""):
        """Map given by ``{generator: {codomain symbol: coefficient}}``.

        A symbol may also be given directly as a string; missing generators map to 0.
        """
        forms = []
        for generator in domain.names:
            target = images.get(generator, {})
            if isinstance(target, str):
                target = {target: 1}
            forms.append(codomain.linear_form(target))
        return cls(domain, codomain, tuple(forms), backend, name)

    @classmethod
    def from_series(cls, domain, codomain, images, backend=FREE, name=""):
        series = []
        for generator in domain.names:
            image = images[generator]
            if image.alphabet != codomain or abs(image.constant_term) > 0:
                raise ContractViolation(f"image of {generator} must be a {codomain.name} series")
            series.append(image)
        return cls(domain, codomain, tuple(series), backend, name)

    @classmethod
    def identity(cls, alphabet, backend=FREE):
        return cls.linear(alphabet, alphabet, {g: g for g in alphabet.names}, backend, "id")

    @property
    def is_linear(self):
        return all(isinstance(image, tuple) for image in self.images)

    def image(self, generator):
        return self.images[self.domain.index(generator)]

    def image_of(self, symbol):
        """Exact linear image of a generator or alias of the domain."""
        if not self.is_linear:
            raise ContractViolation("exact images need a linear map")
        totals = {}
        for generator, coefficient in self.domain.expand(symbol).items():
            for target, inner in self.image(generator):
                totals[target] = totals.get(target, 0) + coefficient * inner
        return self.codomain.linear_form(totals)

    def matrix(self, ctx):
        """Object matrix ``M[out, in]`` of a linear map, integers kept exact."""
        matrix = np.full((self.codomain.size, self.domain.size), 0, dtype=object)
        for column, form in enumerate(self.images):
            for target, coefficient in form:
                row = self.codomain.index(target)
                if coefficient.is_Integer:
                    matrix[row, column] = int(coefficient)
                else:
                    matrix[row, column] = to_scalar(ctx, coefficient)
        return matrix

    def __repr__(self):
        label = self.name or "map"
        return f"<GeneratorMap {label}: {self.domain.name} -> {self.codomain.name}>"


def compose(outer, inner):
    """The map ``outer o inner`` (``inner`` applied first)."""
    if inner.codomain != outer.domain:
        raise ContractViolation(
            f"cannot compose {outer!r} after {inner!r}: "
            f"{inner.codomain.name} != {outer.domain.name}"
        )
    name = f"{outer.name}.{inner.name}" if outer.name and inner.name else ""
    if outer.is_linear and inner.is_linear:
        images = {}
        for generator, form in zip(inner.domain.names, inner.images):
            totals = {}
            for middle, coefficient in form:
                for target, inner_coefficient in outer.image(middle):
                    totals[target] = totals.get(target, 0) + coefficient * inner_coefficient
            images[generator] = totals
        return GeneratorMap.linear(inner.domain, outer.codomain, images, outer.backend, name)
    images = {}
    for generator, image in zip(inner.domain.names, inner.images):
        if isinstance(image, tuple):
            raise ContractViolation("mixed linear/series composition needs series images")
        images[generator] = apply_hom(outer, image)
    return GeneratorMap.from_series(inner.domain, outer.codomain, images, outer.backend, name)


def apply_hom(m, x):
    """Image of ``x`` under the truncated algebra homomorphism extending ``m``."""
    if x.alphabet != m.domain:
        raise ContractViolation(f"{m!r} does not act on {x.alphabet.name} series")
    if x.backend is not FREE:
        raise ContractViolation("homomorphisms act on free-backend series only")
    if m.is_linear:
        return _apply_linear(m, x)
    return _apply_series(m, x)


def _apply_linear(m, x):
    ctx = x.ctx
    matrix = m.matrix(ctx)
    n_in, n_out = m.domain.size, m.codomain.size
    coeffs = [x._coeffs[0].copy()]
    for k in range(1, x.degree + 1):
        source = x._coeffs[k]
        if _is_zero(source):
            coeffs.append(_zeros(ctx, n_out**k))
            continue
        tensor = source.reshape((n_in,) * k)
        for axis in range(k):
            tensor = np.moveaxis(np.tensordot(matrix, tensor, axes=([1], [axis])), 0, axis)
        coeffs.append(m.backend.reduce(k, tensor.ravel().astype(object), ctx))
    return Series(m.codomain, x.degree, x.prec, coeffs, m.backend)


def _apply_series(m, x):
    degree = min([x.degree] + [image.degree for image in m.images])
    images = [image.truncate(degree) for image in m.images]
    for image in images:
        if image.prec != x.prec or image.backend is not m.backend:
            raise ContractViolation("series images must share precision and backend")
    one = Series.one(m.codomain, degree, x.prec, m.backend)

    # Horner scheme on first letters: x = c + sum_g g * (x / g)
    def image_of(arrays):
        result = one * arrays[0][0]
        for g, image in enumerate(images):
            quotients = [a.reshape(m.domain.size, -1)[g] for a in arrays[1:]]
            if quotients and not all(_is_zero(q) for q in quotients):
                result = result + mul(image, image_of(quotients))
        return result

    return image_of(list(x._coeffs[: degree + 1]))


# ---------------------------------------------------------------------------
# shuffles, group-likeness and residuals
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _shuffle_tuples(u, v):
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    counts = Counter()
    for w, mult in _shuffle_tuples(u[1:], v):
        counts[(u[0],) + w] += mult
    for w, mult in _shuffle_tuples(u, v[1:]):
        counts[(v[0],) + w] += mult
    return tuple(counts.items())


def shuffle(u, v):
    """Shuffle product of two words as a ``Counter`` of words with multiplicities."""
    return Counter(dict(_shuffle_tuples(tuple(u), tuple(v))))


def grouplike_residual(g):
    """Largest defect of the shuffle-character identity ``c(u)c(v) = <u sh v, g>``."""
    _require_unit_constant(g, "grouplike_residual")
    if g.backend is not FREE:
        raise ContractViolation("group-likeness is tested on free-backend series")
    n = g.alphabet.size
    worst = g.ctx.mpf(0)
    for total in range(2, g.degree + 1):
        target = g._coeffs[total]
        for left in range(1, total):
            right = total - left
            for u in itertools.product(range(n), repeat=left):
                cu = g._coeffs[left][_code(u, n)]
                for v in itertools.product(range(n), repeat=right):
                    expected = cu * g._coeffs[right][_code(v, n)]
                    for w, mult in _shuffle_tuples(u, v):
                        expected -= mult * target[_code(w, n)]
                    worst = max(worst, abs(expected))
    return worst


def _code(word, n):
    code = 0
    for letter in word:
        code = code * n + letter
    return code


def residual_by_degree(g):
    """Per-degree maxima of ``|coeff(g - 1)|`` for degrees ``0..d``."""
    ctx = g.ctx
    norms = [abs(g.constant_term - 1)]
    for array in g._coeffs[1:]:
        norms.append(max((abs(v) for v in array), default=ctx.mpf(0)))
    return norms


def residual_norm(g):
    """``max |coeff(g - 1)|`` over all words."""
    return max(residual_by_degree(g))


def coefficient_norm(x):
    """``max |coeff(x)|`` over all words."""
    return max(max((abs(v) for v in a), default=x.ctx.mpf(0)) for a in x._coeffs)


# ---------------------------------------------------------------------------
# documents
# ---------------------------------------------------------------------------


def to_document(series, metadata=None):
    """JSON-ready document of a series (decimal strings at full precision)."""
    alphabet = series.alphabet
    coeffs = {}
    for word, value in series.items():
        coeffs[" ".join(word)] = [
            _decimal(series.prec, value.real),
            _decimal(series.prec, value.imag),
        ]
    document = {
        "format": SERIES_FORMAT,
        "alphabet_name": alphabet.name,
        "alphabet": list(alphabet.names),
        "aliases": {
            alias: {g: str(c) for g, c in terms} for alias, terms in alphabet.aliases
        },
        "degree": series.degree,
        "precision_bits": series.prec,
        "backend": series.backend.tag,
        "coeffs": coeffs,
    }
    if metadata is not None:
        document["metadata"] = metadata
    return document


def serialize(series, metadata=None):
    return json.dumps(to_document(series, metadata), indent=1, sort_keys=True) + "\n"


def deserialize(document, alphabet=None, backend=FREE):
    """Rebuild a series from :func:`serialize` output (text or parsed dict).

    When ``alphabet`` is given, a document over any other alphabet is rejected.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SeriesFormatError(f"not a JSON document: {exc}") from exc
    try:
        if document.get("format", SERIES_FORMAT) != SERIES_FORMAT:
            raise SeriesFormatError(f"unsupported format {document.get('format')!r}")
        loaded = Alphabet(
            document.get("alphabet_name", "alphabet"),
            document["alphabet"],
            {
                alias: {g: sympy.Rational(c) for g, c in terms.items()}
                for alias, terms in document.get("aliases", {}).items()
            },
        )
        degree = int(document["degree"])
        prec = int(document["precision_bits"])
        tag = document.get("backend", "free")
        coeffs = document["coeffs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SeriesFormatError(f"malformed series document: {exc}") from exc
    if alphabet is not None and (
        loaded.names != alphabet.names or loaded.aliases != alphabet.aliases
    ):
        raise SeriesFormatError(
            f"document alphabet {list(loaded.names)} does not match {list(alphabet.names)}"
        )
    if tag != backend.tag:
        raise SeriesFormatError(f"document backend {tag!r} does not match {backend.tag!r}")
    target = alphabet or loaded
    ctx = scalar_context(prec)
    arrays = [_zeros(ctx, target.size**k) for k in range(degree + 1)]
    for key, pair in coeffs.items():
        word = target.parse_word(key)
        if len(word) > degree:
            raise SeriesFormatError(f"word {key!r} exceeds degree {degree}")
        try:
            re, im = pair
            value = ctx.mpc(ctx.mpf(re), ctx.mpf(im))
        except (TypeError, ValueError) as exc:
            raise SeriesFormatError(f"malformed coefficient of {key!r}: {exc}") from exc
        arrays[len(word)][target.code(word)] = value
    return Series(target, degree, prec, arrays, backend)


__all__ = [
    "FREE",
    "Alphabet",
    "GeneratorMap",
    "Series",
    "apply_hom",
    "coefficient_norm",
    "compose",
    "deserialize",
    "exact",
    "exp",
    "grouplike_residual",
    "inverse",
    "log",
    "mul",
    "principal_log",
    "residual_by_degree",
    "residual_norm",
    "scalar_context",
    "scalar_power",
    "serialize",
    "shuffle",
    "to_document",
    "to_scalar",
]
