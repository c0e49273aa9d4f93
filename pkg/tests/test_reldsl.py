"""
Relation language: parsing, printing, evaluation errors and agreement with the built-in verifiers.
"""

import pytest
import sympy

from kzassoc.errors import (
    ArityError,
    BackendMismatchError,
    DslError,
    DslSyntaxError,
    UnboundNameError,
)
from kzassoc.ncseries import residual_norm
from kzassoc.relations import BUILTIN_RESIDUALS, catalogue_text, eval_context, load_catalogue
from kzassoc.reldsl import (
    Equality,
    Inverse,
    LieExpr,
    MapApply,
    NamedSeries,
    Product,
    ScalarPower,
    Substitute,
    Unit,
    bind_and_eval,
    parse,
    parse_catalogue,
    referenced_names,
    to_text,
)


def lie(**terms):
    return LieExpr(tuple((name, sympy.Integer(c)) for name, c in terms.items()))


class TestParse:
    def test_duality(self):
        equality = parse("Phi(B, A) Phi == 1")
        assert equality == Equality(
            Product((Substitute("Phi", (lie(B=1), lie(A=1))), NamedSeries("Phi"))), Unit()
        )

    def test_map_application_and_inverse(self):
        equality = parse("st(Psi4) == 2^{-A} Psi4^-1 2^{-b1}")
        assert equality.lhs == MapApply("st", NamedSeries("Psi4"))
        first, middle, last = equality.rhs.factors
        assert isinstance(first, ScalarPower) and first.exponent == lie(A=-1)
        assert first.base.value == 2
        assert middle == Inverse(NamedSeries("Psi4"))
        assert last.exponent == lie(b1=-1)

    def test_gaussian_bases(self):
        equality = parse("(2/i)^{A} i^{2bi} == 1")
        two_over_i, i_power = equality.lhs.factors
        assert two_over_i.base.value == -2 * sympy.I
        assert two_over_i.base.text == "(2/i)"
        assert i_power.base.value == sympy.I
        assert i_power.exponent == lie(bi=2)

    def test_lie_arithmetic(self):
        equality = parse("Psi2(A | 2B, -2(A+B)) == Phi")
        assert equality.lhs.args == (lie(A=1), lie(B=2), lie(A=-2, B=-2))

    def test_fraction_coefficients(self):
        power = parse("2^{1/2A - 3/4B} == 1").lhs
        assert power.exponent.terms == (("A", sympy.Rational(1, 2)), ("B", sympy.Rational(-3, 4)))

    def test_cancelling_terms_are_dropped(self):
        assert parse("2^{A+B-B} == 1").lhs.exponent == lie(A=1)

    def test_repeated_inverse(self):
        assert parse("Phi^-1^-1 == Phi").lhs == Inverse(Inverse(NamedSeries("Phi")))

    def test_comments_are_ignored(self):
        assert parse("Phi == Phi  # trivially") == parse("Phi == Phi")

    def test_referenced_names(self):
        equality = parse("d42(Psi4) == 2^{b1} Psi2 Phi(A, b1)^-1")
        assert referenced_names(equality) == ({"Psi4", "Psi2", "Phi"}, {"d42"})


class TestSyntaxErrors:
    def test_missing_rhs(self):
        with pytest.raises(DslSyntaxError) as excinfo:
            parse("Phi ==")
        assert excinfo.value.line == 1
        assert excinfo.value.column is not None

    def test_unbalanced_parentheses(self):
        with pytest.raises(DslSyntaxError):
            parse("s(Psi4 == 1")

    def test_power_needs_braces(self):
        with pytest.raises(DslSyntaxError):
            parse("2^A == 1")

    def test_zero_divisor_in_a_power_base(self):
        with pytest.raises(DslSyntaxError, match="division by zero") as excinfo:
            parse("(1/0)^{A} == 1")
        assert excinfo.value.line == 1
        assert excinfo.value.column == 2

    def test_divisor_that_folds_to_zero(self):
        with pytest.raises(DslSyntaxError, match="division by zero"):
            parse("(2/(i-i))^{A} == 1")

    def test_zero_denominator_in_a_coefficient(self):
        with pytest.raises(DslSyntaxError, match="division by zero"):
            parse("Phi(1/0 A, B) == Phi")

    def test_catalogue_error_reports_the_line(self):
        with pytest.raises(DslSyntaxError) as excinfo:
            parse_catalogue("a: Phi == Phi\n\n# note\nb: Phi ==\n")
        assert excinfo.value.line == 4

    def test_catalogue_lines_need_labels(self):
        with pytest.raises(DslSyntaxError, match="label"):
            parse_catalogue("Phi == Phi\n")

    def test_duplicate_names(self):
        with pytest.raises(DslSyntaxError, match="duplicate") as excinfo:
            parse_catalogue("a: Phi == Phi\na: Phi == 1\n")
        assert excinfo.value.line == 2

    def test_readings_make_names_distinct(self):
        relations = parse_catalogue("a@x: Phi == Phi\na@y: Phi == 1\n")
        assert [r.full_name for r in relations] == ["a@x", "a@y"]
        assert relations[0].name == "a" and relations[0].reading == "x"


class TestShippedCatalogue:
    def test_relation_names(self):
        names = [spec.name for spec in load_catalogue()]
        assert len(names) == 14
        assert set(names) == set(BUILTIN_RESIDUALS)

    def test_line_numbers_are_recorded(self):
        relations = parse_catalogue(catalogue_text())
        lines = catalogue_text().splitlines()
        for relation in relations:
            assert lines[relation.line - 1].startswith(relation.full_name + ":")

    def test_printer_round_trip(self):
        for relation in parse_catalogue(catalogue_text()):
            assert parse_catalogue(to_text(relation))[0] == relation

    def test_levels(self):
        levels = {spec.name: spec.level for spec in load_catalogue()}
        assert levels["hexagon-psi4"] == 4
        assert levels["broadhurst-psi2"] == 2
        assert levels["phi-duality"] == 1
        assert levels["t4-relation"] == 2


class TestEvaluation:
    def test_unit_relation(self, store):
        residual = bind_and_eval(parse("1 == 1"), eval_context(store, 3))
        assert residual_norm(residual) == 0

    def test_unknown_series(self, store):
        with pytest.raises(UnboundNameError):
            bind_and_eval(parse("Xi == 1"), eval_context(store, 2))

    def test_unknown_map(self, store):
        with pytest.raises(UnboundNameError, match="foo"):
            bind_and_eval(parse("foo(Phi) == Phi"), eval_context(store, 2))

    def test_unknown_generator(self, store):
        with pytest.raises(UnboundNameError):
            bind_and_eval(parse("2^{Q} == 1"), eval_context(store, 2))

    def test_substitution_arity(self, store):
        with pytest.raises(ArityError):
            bind_and_eval(parse("Phi(A, B, A) == 1"), eval_context(store, 2))

    def test_factors_from_different_algebras(self, store):
        with pytest.raises(BackendMismatchError):
            bind_and_eval(parse("Psi2 == Phi"), eval_context(store, 2))

    def test_negative_base_is_reported_with_position(self, store):
        with pytest.raises(DslError) as excinfo:
            bind_and_eval(parse("(-1)^{A} == 1"), eval_context(store, 2))
        assert excinfo.value.column is not None

    def test_trivial_identities(self, store):
        for text in ("Phi Phi^-1 == 1", "Phi == (Phi^-1)^-1", "2^{A} 2^{-A} == 1"):
            residual = bind_and_eval(parse(text), eval_context(store, 4))
            assert residual_norm(residual) < 1e-30


ENGINE_DEGREES = {
    "hexagon-psi4": 3,
    "okuda-psi4": 3,
    "octogon-psi4": 3,
    "broadhurst-psi2": 4,
    "distributivity-delta42": 3,
    "distributivity-pi42": 3,
    "distributivity-delta41": 3,
    "distributivity-pi-phi@pi41": 3,
    "distributivity-pi-phi@pi42": 3,
    "ns1": 4,
    "ns2": 4,
    "phi-duality": 5,
    "phi-half": 5,
    "t4-relation": 3,
}


@pytest.mark.parametrize("name", sorted(ENGINE_DEGREES))
def test_engine_matches_builtin_verifier(store, name):
    degree = ENGINE_DEGREES[name]
    spec = {spec.name: spec for spec in load_catalogue()}[name]
    from_text = bind_and_eval(spec.relation, eval_context(store, degree))
    function, _ = BUILTIN_RESIDUALS[name]
    builtin = function(store, degree)
    assert from_text.alphabet == builtin.alphabet
    for k in range(degree + 1):
        assert list(from_text.homogeneous(k)) == list(builtin.homogeneous(k)), (name, k)
