"""
A small language for relations between group-like series.

One relation per line::

    # comment
    okuda-psi4: st(Psi4) == 2^{-A} Psi4^-1 2^{-b1}

Juxtaposition multiplies, ``x^-1`` inverts the nearest factor, ``base^{lie}`` is the
principal scalar power ``exp(lie * ln base)`` with an exact Gaussian base such as
``2``, ``i`` or ``(2/i)``.  ``name(expr)`` applies a named automorphism and
``name(lie | lie, ...)`` substitutes linear combinations for the generators of a
named series (``|`` and ``,`` are interchangeable separators).

:func:`bind_and_eval` evaluates a relation against an :class:`EvalContext` and
returns the residual ``LHS * RHS^-1``.
"""

import functools
import logging
from dataclasses import dataclass, field

import pyparsing as pp
import sympy

from .errors import (
    ArityError,
    BackendMismatchError,
    DslError,
    DslSyntaxError,
    KzAssocError,
    UnboundNameError,
)
from .ncseries import FREE, GeneratorMap, Series, apply_hom, inverse, mul, scalar_power

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LieExpr:
    """Exact linear combination ``((name, coefficient), ...)`` in order of appearance."""

    terms: tuple
    column: int = field(default=None, compare=False)

    def names(self):
        return {name for name, _ in self.terms}

    def scaled(self, factor):
        return LieExpr(tuple((n, sympy.expand(c * factor)) for n, c in self.terms), self.column)


@dataclass(frozen=True)
class ScalarLiteral:
    text: str
    value: object


@dataclass(frozen=True)
class Unit:
    column: int = field(default=None, compare=False)


@dataclass(frozen=True)
class NamedSeries:
    name: str
    column: int = field(default=None, compare=False)


@dataclass(frozen=True)
class ScalarPower:
    base: ScalarLiteral
    exponent: LieExpr
    column: int = field(default=None, compare=False)


@dataclass(frozen=True)
class Inverse:
    operand: object
    column: int = field(default=None, compare=False)


@dataclass(frozen=True)
class MapApply:
    map_name: str
    operand: object
    column: int = field(default=None, compare=False)


@dataclass(frozen=True)
class Substitute:
    series_name: str
    args: tuple
    column: int = field(default=None, compare=False)


@dataclass(frozen=True)
class Product:
    factors: tuple
    column: int = field(default=None, compare=False)


@dataclass(frozen=True)
class Equality:
    lhs: object
    rhs: object
    line: int = field(default=None, compare=False)


@dataclass(frozen=True)
class Relation:
    """A named catalogue line; ``reading`` is the part after ``@`` (or ``None``)."""

    name: str
    reading: str
    equality: Equality
    line: int = field(default=None, compare=False)

    @property
    def full_name(self):
        return f"{self.name}@{self.reading}" if self.reading else self.name


# ---------------------------------------------------------------------------
# grammar
# ---------------------------------------------------------------------------


def _finite(value, s, loc):
    value = sympy.expand(value)
    if value.is_finite is not True:
        raise pp.ParseFatalException(s, loc, f"scalar {value} is not a finite number")
    return value


def _fold(s, loc, tokens):
    """Evaluate one infix level ``[a, op, b, op, c, ...]`` left to right."""
    items = tokens[0]
    value = items[0]
    for op, operand in zip(items[1::2], items[2::2]):
        if op == "*":
            value = value * operand
        elif op == "/":
            if operand == 0:
                raise pp.ParseFatalException(s, loc, "division by zero")
            value = value / operand
        elif op == "+":
            value = value + operand
        else:
            value = value - operand
    return _finite(value, s, loc)


def _merge(parts, column):
    totals = {}
    for part in parts:
        for name, coefficient in part.terms:
            totals[name] = sympy.expand(totals.get(name, 0) + coefficient)
    return LieExpr(tuple((n, c) for n, c in totals.items() if c != 0), column)


@functools.lru_cache(maxsize=None)
def _grammar():
    lpar, rpar, lbrace, rbrace = map(pp.Suppress, "(){}")
    ident = pp.Word(pp.alphas, pp.alphanums + "_")
    integer = pp.Word(pp.nums).set_parse_action(lambda t: sympy.Integer(t[0]))
    imaginary = pp.Keyword("i").set_parse_action(lambda: sympy.I)

    scalar = pp.infix_notation(
        integer | imaginary,
        [
            (pp.Literal("-"), 1, pp.OpAssoc.RIGHT, lambda t: -t[0][1]),
            (pp.one_of("* /"), 2, pp.OpAssoc.LEFT, _fold),
            (pp.one_of("+ -"), 2, pp.OpAssoc.LEFT, _fold),
        ],
    )

    base = pp.Located(integer | imaginary | lpar + scalar + rpar)

    def scalar_literal(s, loc, t):
        start, tokens, end = t[0], t[1], t[2]
        return ScalarLiteral(s[start:end].strip(), sympy.expand(tokens[0]))

    base.set_parse_action(scalar_literal)

    lie = pp.Forward()
    fraction = integer + pp.Optional(pp.Suppress("/") + integer)

    def ratio(s, loc, t):
        if len(t) == 2 and t[1] == 0:
            raise pp.ParseFatalException(s, loc, "division by zero")
        return t[0] / t[1] if len(t) == 2 else t[0]

    fraction.set_parse_action(ratio)
    coefficient = fraction | lpar + scalar + rpar
    body = ident | lpar + lie + rpar

    def term(s, loc, t):
        factor = t[0] if len(t) == 2 else sympy.Integer(1)
        target = t[-1]
        if isinstance(target, str):
            return LieExpr(((target, factor),), pp.col(loc, s))
        return target.scaled(factor)

    lie_term = (pp.Optional(coefficient + pp.Optional(pp.Suppress("*"))) + body)
    lie_term.set_parse_action(term)
    sign = pp.one_of("+ -")
    first = pp.Optional(sign, default="+") + lie_term
    rest = sign + lie_term

    def signed(t):
        return t[1] if t[0] == "+" else t[1].scaled(-1)

    first.set_parse_action(signed)
    rest.set_parse_action(signed)
    lie <<= (first + pp.ZeroOrMore(rest)).set_parse_action(
        lambda s, loc, t: _merge(t, pp.col(loc, s))
    )

    product = pp.Forward()
    power = (base + pp.Suppress("^") + lbrace + lie + rbrace).set_parse_action(
        lambda s, loc, t: ScalarPower(t[0], t[1], pp.col(loc, s))
    )
    separator = pp.Suppress(pp.one_of(", |"))
    substitution = lie + pp.OneOrMore(separator + lie)

    def call(s, loc, t):
        if len(t) > 2:
            return Substitute(t[0], tuple(t[1:]), pp.col(loc, s))
        return MapApply(t[0], t[1], pp.col(loc, s))

    applied = (ident + lpar + (substitution | product) + rpar).set_parse_action(call)
    unit = pp.Keyword("1").set_parse_action(lambda s, loc, t: Unit(pp.col(loc, s)))
    named = ident.copy().set_parse_action(lambda s, loc, t: NamedSeries(t[0], pp.col(loc, s)))
    atom = power | applied | lpar + product + rpar | unit | named

    def factor(s, loc, t):
        node = t[0]
        for _ in t[1:]:
            node = Inverse(node, pp.col(loc, s))
        return node

    inverted = atom + pp.ZeroOrMore(pp.Literal("^-1"))
    inverted.set_parse_action(factor)

    def juxtaposition(s, loc, t):
        return t[0] if len(t) == 1 else Product(tuple(t), pp.col(loc, s))

    product <<= pp.OneOrMore(inverted).set_parse_action(juxtaposition)
    equality = (product + pp.Suppress("==") + product).set_parse_action(
        lambda s, loc, t: Equality(t[0], t[1], pp.lineno(loc, s))
    )
    name = pp.Word(pp.alphanums, pp.alphanums + "-_")
    label = pp.Group(name + pp.Optional(pp.Suppress("@") + name)) + pp.Suppress(":")
    line = pp.Optional(label) + equality
    return line


def _strip_comment(text):
    return text.split("#", 1)[0]


def _parse_line(text, line_number=None):
    try:
        tokens = _grammar().parse_string(text, parse_all=True)
    except pp.ParseBaseException as exc:
        line = line_number if line_number is not None else exc.lineno
        raise DslSyntaxError(exc.msg, line, exc.col) from None
    if len(tokens) == 1:
        return None, tokens[0]
    return list(tokens[0]), tokens[1]


def parse(text):
    """Parse one relation ``expr == expr`` (an optional ``name:`` prefix is dropped)."""
    text = "\n".join(_strip_comment(line) for line in text.splitlines())
    _, equality = _parse_line(text)
    return equality


def parse_catalogue(text):
    """Parse catalogue text into :class:`Relation` objects, in file order."""
    relations = []
    seen = set()
    for number, raw in enumerate(text.splitlines(), start=1):
        content = _strip_comment(raw)
        if not content.strip():
            continue
        label, equality = _parse_line(content, number)
        if label is None:
            raise DslSyntaxError("catalogue relations need a 'name:' label", number, 1)
        name, reading = label[0], (label[1] if len(label) > 1 else None)
        relation = Relation(name, reading, Equality(equality.lhs, equality.rhs, number), number)
        if relation.full_name in seen:
            raise DslSyntaxError(f"duplicate relation name {relation.full_name!r}", number, 1)
        seen.add(relation.full_name)
        relations.append(relation)
    return relations


# ---------------------------------------------------------------------------
# printer
# ---------------------------------------------------------------------------


def _format_coefficient(value):
    if value.is_Integer or value.is_Rational:
        return str(value)
    re, im = value.as_real_imag()
    if re == 0 and im.is_Rational:
        return f"({im.p}*i)" if im.q == 1 else f"({im.p}*i/{im.q})"
    return "(" + str(value).replace("I", "i").replace(" ", "") + ")"


def _format_lie(expr):
    pieces = []
    for position, (name, coefficient) in enumerate(expr.terms):
        negative = coefficient.is_real and coefficient < 0
        magnitude = -coefficient if negative else coefficient
        sign = "-" if negative else ("+" if position else "")
        text = "" if magnitude == 1 else _format_coefficient(magnitude)
        pieces.append(f"{sign}{text}{name}")
    return "".join(pieces) if pieces else "0"


def to_text(node):
    """Canonical text of an AST node; parsing it gives back an equal node."""
    if isinstance(node, Relation):
        return f"{node.full_name}: {to_text(node.equality)}"
    if isinstance(node, Equality):
        return f"{to_text(node.lhs)} == {to_text(node.rhs)}"
    if isinstance(node, Product):
        return " ".join(to_text(f) for f in node.factors)
    if isinstance(node, Inverse):
        inner = to_text(node.operand)
        if isinstance(node.operand, Product):
            inner = f"({inner})"
        return f"{inner}^-1"
    if isinstance(node, ScalarPower):
        return f"{node.base.text}^{{{_format_lie(node.exponent)}}}"
    if isinstance(node, NamedSeries):
        return node.name
    if isinstance(node, Unit):
        return "1"
    if isinstance(node, MapApply):
        return f"{node.map_name}({to_text(node.operand)})"
    if isinstance(node, Substitute):
        return f"{node.series_name}({', '.join(_format_lie(a) for a in node.args)})"
    if isinstance(node, LieExpr):
        return _format_lie(node)
    raise TypeError(f"not a relation node: {node!r}")


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


@dataclass
class EvalContext:
    """Bindings for evaluation.

    ``series`` maps names to Series (any mapping, so values may be computed
    lazily), ``maps`` maps names to GeneratorMaps, ``alphabets`` lists the
    algebras in which lie expressions are looked up (first match wins) and
    ``backends`` picks the multiplication backend per alphabet name.
    """

    series: object
    maps: dict
    alphabets: tuple
    degree: int
    prec: int
    backends: dict = field(default_factory=dict)
    default_alphabet: object = None

    def backend(self, alphabet):
        return self.backends.get(alphabet.name, FREE)

    def lookup_series(self, name, column, line):
        try:
            value = self.series[name]
        except KeyError:
            raise UnboundNameError(f"unknown series {name!r}", line, column) from None
        if value.degree < self.degree:
            raise DslError(f"{name} is only known to degree {value.degree}", line, column)
        return value.truncate(self.degree)

    def lookup_map(self, name, column, line):
        if name not in self.maps:
            raise UnboundNameError(f"unknown map {name!r}", line, column)
        return self.maps[name]


def _top_alphabet(node, context):
    if isinstance(node, Product):
        for factor in node.factors:
            found = _top_alphabet(factor, context)
            if found is not None:
                return found
        return None
    if isinstance(node, Inverse):
        return _top_alphabet(node.operand, context)
    if isinstance(node, NamedSeries) and node.name in context.series:
        return context.series[node.name].alphabet
    if isinstance(node, MapApply) and node.map_name in context.maps:
        return context.maps[node.map_name].codomain
    return None


def _lie_names(node):
    if isinstance(node, LieExpr):
        return node.names()
    if isinstance(node, ScalarPower):
        return node.exponent.names()
    if isinstance(node, Substitute):
        return set().union(*(a.names() for a in node.args))
    children = []
    if isinstance(node, Equality):
        children = [node.lhs, node.rhs]
    elif isinstance(node, Product):
        children = list(node.factors)
    elif isinstance(node, (Inverse, MapApply)):
        children = [node.operand]
    return set().union(set(), *(_lie_names(c) for c in children))


def referenced_names(node):
    """``(series names, map names)`` used anywhere below ``node``."""
    if isinstance(node, Relation):
        node = node.equality
    series, maps = set(), set()
    stack = [node]
    while stack:
        current = stack.pop()
        if isinstance(current, NamedSeries):
            series.add(current.name)
        elif isinstance(current, Substitute):
            series.add(current.series_name)
        elif isinstance(current, MapApply):
            maps.add(current.map_name)
            stack.append(current.operand)
        elif isinstance(current, Inverse):
            stack.append(current.operand)
        elif isinstance(current, Product):
            stack.extend(current.factors)
        elif isinstance(current, Equality):
            stack.extend((current.lhs, current.rhs))
    return series, maps


def infer_alphabet(equality, context):
    """Named series or map codomain first, then the first alphabet knowing every name."""
    for side in (equality.lhs, equality.rhs):
        found = _top_alphabet(side, context)
        if found is not None:
            return found
    names = _lie_names(equality)
    for alphabet in context.alphabets:
        if all(alphabet.knows(n) for n in names):
            return alphabet
    return context.default_alphabet or context.alphabets[0]


class _Evaluator:
    def __init__(self, context, line):
        self.context = context
        self.line = line

    def fail(self, error_class, message, node):
        raise error_class(message, self.line, getattr(node, "column", None))

    def lie(self, expr, alphabet):
        unknown = sorted(n for n in expr.names() if not alphabet.knows(n))
        if unknown:
            self.fail(UnboundNameError, f"{', '.join(unknown)} not in {alphabet.name}", expr)
        return dict(expr.terms)

    def evaluate(self, node, alphabet):
        try:
            result = self._evaluate(node, alphabet)
        except DslError:
            raise
        except KzAssocError as exc:
            self.fail(DslError, str(exc), node)
        if result.alphabet != alphabet:
            self.fail(
                BackendMismatchError,
                f"factor lives in {result.alphabet.name}, product in {alphabet.name}",
                node,
            )
        return result

    def _evaluate(self, node, alphabet):
        ctx = self.context
        if isinstance(node, Product):
            result = self.evaluate(node.factors[0], alphabet)
            for factor in node.factors[1:]:
                result = mul(result, self.evaluate(factor, alphabet))
            return result
        if isinstance(node, Inverse):
            return inverse(self.evaluate(node.operand, alphabet))
        if isinstance(node, Unit):
            return Series.one(alphabet, ctx.degree, ctx.prec, ctx.backend(alphabet))
        if isinstance(node, NamedSeries):
            return ctx.lookup_series(node.name, node.column, self.line)
        if isinstance(node, ScalarPower):
            exponent = Series.lie(
                alphabet, self.lie(node.exponent, alphabet), ctx.degree, ctx.prec,
                ctx.backend(alphabet),
            )
            return scalar_power(node.base.value, exponent)
        if isinstance(node, MapApply):
            m = ctx.lookup_map(node.map_name, node.column, self.line)
            return apply_hom(m, self.evaluate(node.operand, m.domain))
        if isinstance(node, Substitute):
            target = ctx.lookup_series(node.series_name, node.column, self.line)
            domain = target.alphabet
            if len(node.args) != domain.size:
                self.fail(
                    ArityError,
                    f"{node.series_name} takes {domain.size} arguments, got {len(node.args)}",
                    node,
                )
            images = {g: self.lie(arg, alphabet) for g, arg in zip(domain.names, node.args)}
            m = GeneratorMap.linear(domain, alphabet, images, ctx.backend(alphabet))
            return apply_hom(m, target)
        raise TypeError(f"not an expression node: {node!r}")


def bind_and_eval(relation, context):
    """Residual ``LHS * RHS^-1`` of a relation (or bare equality) in ``context``."""
    equality = relation.equality if isinstance(relation, Relation) else relation
    alphabet = infer_alphabet(equality, context)
    evaluator = _Evaluator(context, equality.line)
    lhs = evaluator.evaluate(equality.lhs, alphabet)
    rhs = evaluator.evaluate(equality.rhs, alphabet)
    return mul(lhs, inverse(rhs))


__all__ = [
    "EvalContext",
    "Equality",
    "Inverse",
    "LieExpr",
    "MapApply",
    "NamedSeries",
    "Product",
    "Relation",
    "ScalarLiteral",
    "ScalarPower",
    "Substitute",
    "Unit",
    "bind_and_eval",
    "infer_alphabet",
    "parse",
    "parse_catalogue",
    "referenced_names",
    "to_text",
]
