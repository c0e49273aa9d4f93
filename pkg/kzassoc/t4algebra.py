"""
Truncated enveloping algebra of the infinitesimal pure braid Lie algebra on four strands.

Generators ``t_ij`` (``i < j``) satisfy ``[t_ij + t_ik, t_jk] = 0`` for every triple and
``[t_ij, t_kl] = 0`` for disjoint pairs.  Each degree is handled by exact row
reduction of the ideal slice spanned by ``u * relation * v``; the largest word of
every row is its pivot, the remaining (non-pivot) words form the basis.

The finished :class:`NormalFormTable` doubles as a :class:`~kzassoc.ncseries.Series`
backend: concatenations are reduced onto the basis after every product.
"""

import itertools
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .decorators import trace
from .errors import ContractViolation, ResourceGuardError, SeriesFormatError
from .ncseries import FREE, Alphabet, GeneratorMap, apply_hom, to_scalar

logger = logging.getLogger(__name__)

TABLE_FORMAT = "kzassoc.t4table/1"
STRANDS = 4
DEFAULT_MAX_WORDS = 6**5


def _pair_name(i, j):
    i, j = sorted((i, j))
    return f"t{i}{j}"


GENERATORS = tuple(_pair_name(i, j) for i, j in itertools.combinations(range(1, STRANDS + 1), 2))


def t4_alphabet():
    """Alphabet ``t12 < t13 < t14 < t23 < t24 < t34`` with ``Z`` and ``tji = tij``."""
    aliases = {"Z": {g: 1 for g in GENERATORS}}
    for i, j in itertools.combinations(range(1, STRANDS + 1), 2):
        aliases[f"t{j}{i}"] = {_pair_name(i, j): 1}
    return Alphabet("t4", GENERATORS, aliases)


T4 = t4_alphabet()


def _commutator(x, y):
    """``[x, y]`` of two degree-one forms ``{index: Fraction}`` as ``{(a, b): Fraction}``."""
    result = {}
    for a, ca in x.items():
        for b, cb in y.items():
            if a == b:
                continue
            result[(a, b)] = result.get((a, b), 0) + ca * cb
            result[(b, a)] = result.get((b, a), 0) - ca * cb
    return {word: c for word, c in result.items() if c != 0}


@dataclass(frozen=True)
class T4Presentation:
    """Quadratic presentation of ``t4``: six generators and fifteen spanning relations."""

    alphabet: Alphabet = T4
    relations: tuple = field(default=None)

    def __post_init__(self):
        if self.relations is None:
            object.__setattr__(self, "relations", tuple(self._quadratic_relations()))

    def _generator(self, i, j):
        return {self.alphabet.index(_pair_name(i, j)): Fraction(1)}

    def _quadratic_relations(self):
        strands = range(1, STRANDS + 1)
        for a, b, c in itertools.combinations(strands, 3):
            for i, j, k in ((a, b, c), (b, a, c), (c, a, b)):
                left = self._generator(i, j)
                for index, value in self._generator(i, k).items():
                    left[index] = left.get(index, 0) + value
                yield (f"[t{i}{j}+t{i}{k},t{j}{k}]", _commutator(left, self._generator(j, k)))
        for (i, j), (k, l) in (((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3))):
            yield (f"[t{i}{j},t{k}{l}]", _commutator(self._generator(i, j), self._generator(k, l)))

    def rows(self, degree):
        """Every ``u * relation * v`` of total ``degree`` as ``{code: Fraction}``."""
        n = self.alphabet.size
        for _, relation in self.relations:
            for left in range(degree - 1):
                right = degree - 2 - left
                for u in range(n**left):
                    for v in range(n**right):
                        yield {
                            (u * n**2 + a * n + b) * n**right + v: c
                            for (a, b), c in relation.items()
                        }


def hilbert_dimensions(degree):
    """Coefficients of ``1/((1-t)(1-2t)(1-3t))`` up to ``t**degree``."""
    dims = []
    for k in range(degree + 1):
        dims.append(sum(2**b * 3 ** (k - a - b) for a in range(k + 1) for b in range(k - a + 1)))
    return dims


class NormalFormTable:
    """Per-degree bases and exact reductions of the truncated ``U(t4)``.

    ``bases[k]`` lists basis word codes in increasing order, ``reductions[k]`` maps
    each pivot code to ``{basis code: Fraction}``.  The object is also the Series
    backend tagged ``"t4nf"``.
    """

    tag = "t4nf"

    def __init__(self, alphabet, max_degree, bases, reductions):
        self.alphabet = alphabet
        self.max_degree = max_degree
        self.bases = tuple(tuple(basis) for basis in bases)
        self.reductions = tuple(reductions)
        self._numeric = {}

    def __repr__(self):
        return f"<NormalFormTable {self.alphabet.name} d={self.max_degree}>"

    # -- backend protocol -------------------------------------------------

    def accepts(self, alphabet, degree):
        return alphabet == self.alphabet and degree <= self.max_degree

    def reduce(self, degree, array, ctx):
        pivots, basis, matrix = self._numeric_reduction(degree, ctx)
        if not len(pivots):
            return array
        eliminated = array[pivots]
        if not any(eliminated):
            return array
        out = array.copy()
        out[basis] = out[basis] + eliminated.dot(matrix)
        out[pivots] = ctx.mpc(0)
        return out

    def _numeric_reduction(self, degree, ctx):
        self._check_degree(degree)
        key = (degree, ctx.prec)
        if key not in self._numeric:
            reduction = self.reductions[degree]
            pivots = np.array(sorted(reduction), dtype=np.int64)
            basis = np.array(self.bases[degree], dtype=np.int64)
            position = {code: column for column, code in enumerate(self.bases[degree])}
            matrix = np.full((len(pivots), len(basis)), ctx.mpc(0), dtype=object)
            for row, pivot in enumerate(pivots):
                for code, value in reduction[int(pivot)].items():
                    matrix[row, position[code]] = to_scalar(ctx, value)
            self._numeric[key] = (pivots, basis, matrix)
        return self._numeric[key]

    # -- exact queries ----------------------------------------------------

    def dimension(self, degree):
        return len(self.bases[degree])

    def dimensions(self):
        return [len(basis) for basis in self.bases]

    def basis_words(self, degree):
        return [self.alphabet.word(code, degree) for code in self.bases[degree]]

    def _check_degree(self, degree):
        if degree > self.max_degree:
            raise ContractViolation(f"table built to degree {self.max_degree}, need {degree}")

    def reduce_exact(self, degree, vector):
        """Reduce ``{code: Fraction}`` of one degree onto the basis."""
        self._check_degree(degree)
        reduction = self.reductions[degree]
        result = {}
        for code, value in vector.items():
            for target, coefficient in reduction.get(code, {code: 1}).items():
                result[target] = result.get(target, 0) + value * coefficient
        return {code: value for code, value in result.items() if value != 0}

    def multiply_exact(self, left, left_degree, right, right_degree):
        """Normal form of the product of two exact vectors."""
        shift = self.alphabet.size**right_degree
        product = {}
        for a, ca in left.items():
            for b, cb in right.items():
                code = a * shift + b
                product[code] = product.get(code, 0) + ca * cb
        return self.reduce_exact(left_degree + right_degree, product)

    def central_defect(self, symbol="Z"):
        """Number of basis words ``w`` with ``nf(Z w - w Z) != 0`` (exact)."""
        z = {
            self.alphabet.index(g): Fraction(c.p, c.q)
            for g, c in self.alphabet.linear_form({symbol: 1})
        }
        failures = 0
        for degree in range(self.max_degree):
            for code in self.bases[degree]:
                w = {code: Fraction(1)}
                left = self.multiply_exact(z, 1, w, degree)
                right = self.multiply_exact(w, degree, z, 1)
                for key in set(left) | set(right):
                    if left.get(key, 0) != right.get(key, 0):
                        failures += 1
                        break
        return failures

    # -- documents --------------------------------------------------------

    def to_document(self):
        def word(code, degree):
            return " ".join(self.alphabet.word(code, degree))

        return {
            "format": TABLE_FORMAT,
            "generators": list(self.alphabet.names),
            "degree": self.max_degree,
            "bases": [[word(c, k) for c in basis] for k, basis in enumerate(self.bases)],
            "reductions": [
                {
                    word(pivot, k): {word(c, k): str(v) for c, v in sorted(row.items())}
                    for pivot, row in sorted(reduction.items())
                }
                for k, reduction in enumerate(self.reductions)
            ],
        }

    def serialize(self):
        return json.dumps(self.to_document(), sort_keys=True) + "\n"

    @classmethod
    def from_document(cls, document, degree=None, alphabet=T4):
        """Load a table; a different generator order or degree invalidates it."""
        if isinstance(document, str):
            try:
                document = json.loads(document)
            except json.JSONDecodeError as exc:
                raise SeriesFormatError(f"not a JSON document: {exc}") from exc
        try:
            if document["format"] != TABLE_FORMAT:
                raise SeriesFormatError(f"unsupported table format {document['format']!r}")
            if tuple(document["generators"]) != alphabet.names:
                raise SeriesFormatError("table generator order does not match")
            max_degree = int(document["degree"])
            if degree is not None and max_degree != degree:
                raise SeriesFormatError(f"table degree {max_degree} != requested {degree}")
            bases = [
                [alphabet.code(alphabet.parse_word(w)) for w in basis]
                for basis in document["bases"]
            ]
            reductions = [
                {
                    alphabet.code(alphabet.parse_word(pivot)): {
                        alphabet.code(alphabet.parse_word(w)): Fraction(v)
                        for w, v in row.items()
                    }
                    for pivot, row in reduction.items()
                }
                for reduction in document["reductions"]
            ]
        except (KeyError, TypeError, ValueError, ContractViolation) as exc:
            raise SeriesFormatError(f"malformed table document: {exc}") from exc
        if len(bases) != max_degree + 1 or len(reductions) != max_degree + 1:
            raise SeriesFormatError("table document is missing degrees")
        return cls(alphabet, max_degree, bases, reductions)


def _eliminate(rows):
    """Echelon form keyed by pivot (largest code), then full back-substitution."""
    pivots = {}
    for row in rows:
        row = dict(row)
        while row:
            pivot = max(row)
            if pivot not in pivots:
                scale = row[pivot]
                pivots[pivot] = {code: value / scale for code, value in row.items()}
                break
            factor = row[pivot]
            for code, value in pivots[pivot].items():
                updated = row.get(code, 0) - factor * value
                if updated:
                    row[code] = updated
                else:
                    row.pop(code, None)
    for pivot in sorted(pivots):
        row = pivots[pivot]
        for code in [c for c in row if c != pivot and c in pivots]:
            factor = row.pop(code)
            for inner, value in pivots[code].items():
                if inner == code:
                    continue
                updated = row.get(inner, 0) - factor * value
                if updated:
                    row[inner] = updated
                else:
                    row.pop(inner, None)
    # w_pivot = -sum(rest) in the quotient
    return {
        pivot: {code: -value for code, value in row.items() if code != pivot}
        for pivot, row in pivots.items()
    }


@trace
def build_normal_forms(degree, max_words=DEFAULT_MAX_WORDS):
    """Build the normal-form table of ``U(t4)`` up to ``degree``.

    Raises :class:`ResourceGuardError` when a degree has more than ``max_words``
    free monomials.
    """
    presentation = T4Presentation()
    n = presentation.alphabet.size
    bases, reductions = [], []
    for k in range(degree + 1):
        words = n**k
        if words > max_words:
            raise ResourceGuardError(k, words, max_words)
        reduction = _eliminate(presentation.rows(k)) if k >= 2 else {}
        bases.append([code for code in range(words) if code not in reduction])
        reductions.append(reduction)
        logger.info(
            "normal forms built",
            extra={"data": {"degree": k, "words": words, "dimension": len(bases[-1])}},
        )
    table = NormalFormTable(presentation.alphabet, degree, bases, reductions)
    expected = hilbert_dimensions(degree)
    if table.dimensions() != expected:
        raise ContractViolation(
            f"U(t4) dimensions {table.dimensions()} differ from the Hilbert series {expected}"
        )
    return table


def nf_reduce(table, word):
    """Coordinates of a free monomial in the basis, as ``{basis word: Fraction}``."""
    word = table.alphabet.parse_word(word)
    degree = len(word)
    reduced = table.reduce_exact(degree, {table.alphabet.code(word): Fraction(1)})
    return {table.alphabet.word(code, degree): value for code, value in sorted(reduced.items())}


def embedding(domain, images, table, name=""):
    """Linear map from ``domain`` into ``U(t4)`` sending generators to ``t4`` forms."""
    return GeneratorMap.linear(domain, table.alphabet, images, backend=table, name=name)


def embed(m, x):
    """Push a free series through an embedding into the table backend, word by word."""
    if not isinstance(m.backend, NormalFormTable):
        raise ContractViolation(f"{m!r} does not land in a normal-form backend")
    if x.backend is not FREE:
        raise ContractViolation("only free-backend series can be embedded")
    return apply_hom(m, x)


__all__ = [
    "GENERATORS",
    "T4",
    "NormalFormTable",
    "T4Presentation",
    "build_normal_forms",
    "embed",
    "embedding",
    "hilbert_dimensions",
    "nf_reduce",
    "t4_alphabet",
]
