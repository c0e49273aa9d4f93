"""
Relation verifiers, fault injection, catalogue runs and reports.
"""

import json

import mpmath
import pytest

from kzassoc.cache import DiskCache
from kzassoc.config import ConfigError, RunConfig
from kzassoc.errors import SeriesFormatError
from kzassoc.ncseries import Series, coefficient_norm, exp, residual_norm, scalar_context
from kzassoc.relations import (
    AssociatorStore,
    ReportRow,
    VerificationReport,
    flip_largest_coefficient,
    hexagon_residual,
    oracle_comparison,
    residual_modulo_center,
    verify_all,
    verify_automorphism_presentation,
    verify_broadhurst,
    verify_connection_change,
    verify_distributivity,
    verify_grouplike,
    verify_hexagon_psi4,
    verify_ns1,
    verify_ns2,
    verify_octogon,
    verify_okuda,
    verify_phi_duality,
    verify_phi_half,
    verify_t4_presentation,
    verify_t4_relation,
)
from kzassoc.t4algebra import T4

TEST_TOL = 1e-18


def write_catalogue(tmp_path, text):
    path = tmp_path / "relations.rel"
    path.write_text(text, encoding="utf-8")
    return path


def row(name, residual, tolerance=1e-10):
    ctx = scalar_context(64)
    return ReportRow(
        name=name,
        algebra="f2",
        degree=1,
        precision_bits=64,
        terms=10,
        residual=ctx.mpf(residual),
        residual_by_degree=(),
        tolerance=tolerance,
        tail_bound=ctx.mpf(0),
    )


class TestBuiltinVerifiers:
    @pytest.mark.parametrize(
        "verify, degree",
        [
            (verify_hexagon_psi4, 3),
            (verify_okuda, 3),
            (verify_octogon, 3),
            (verify_broadhurst, 4),
            (verify_ns1, 4),
            (verify_ns2, 4),
            (verify_phi_duality, 6),
            (verify_phi_half, 6),
        ],
    )
    def test_relation_holds(self, store, verify, degree):
        result = verify(store, degree=degree, tolerance=TEST_TOL)
        assert result.passed, (result.name, result.residual)
        assert len(result.residual_by_degree) == degree + 1
        assert result.tail_bound > 0

    def test_t4_relation(self, store):
        result = verify_t4_relation(store, degree=3)
        assert result.passed
        assert result.algebra == T4.name
        assert result.tolerance == 1e-15
        assert result.notes["center_defect"] == 0
        assert mpmath.mpf(result.notes["residual_mod_center"]) < 1e-15

    def test_distributivity_rows(self, store):
        rows = {r.name: r for r in verify_distributivity(store, degree=3, tolerance=TEST_TOL)}
        assert len(rows) == 5
        for name in ("distributivity-delta42", "distributivity-pi42", "distributivity-delta41"):
            assert rows[name].passed, name

    def test_pi_line_holds_in_its_pi41_reading(self, store):
        rows = verify_distributivity(store, degree=3, tolerance=TEST_TOL)
        report = VerificationReport(rows)
        group = report.groups()["distributivity-pi-phi"]
        assert group["readings"] == {"pi41": True, "pi42": False}
        assert group["passed"] and group["reading"] == "pi41"
        assert report.passed

    def test_degree_zero(self, store):
        result = verify_hexagon_psi4(store, degree=0, tolerance=0)
        assert result.residual == 0
        assert len(result.residual_by_degree) == 1
        assert result.passed

    def test_degree_one_slices_hold(self, store):
        for result in verify_distributivity(store, degree=1, tolerance=TEST_TOL):
            if result.name != "distributivity-pi-phi@pi42":
                assert result.residual_by_degree[1] < TEST_TOL, result.name

    def test_truncations_are_coherent(self, store):
        high = hexagon_residual(store, 3)
        low = hexagon_residual(store, 2)
        assert coefficient_norm(high.truncate(2) - low) < 1e-30

    def test_zero_tolerance_fails(self, store):
        assert not verify_hexagon_psi4(store, degree=3, tolerance=0).passed


class TestFaultInjection:
    def test_flipped_psi4_breaks_the_hexagon(self, store):
        faulty = store.replace("Psi4", flip_largest_coefficient(store.series("Psi4", 3), 3))
        result = verify_hexagon_psi4(faulty, degree=3, tolerance=TEST_TOL)
        assert not result.passed
        assert result.degree == 3
        assert max(result.residual_by_degree[:3]) < TEST_TOL
        assert result.residual_by_degree[3] > 1e-5
        assert verify_hexagon_psi4(store, degree=3, tolerance=TEST_TOL).passed

    def test_flipped_phi_shows_up_in_degree_two(self, store):
        faulty = store.replace("Phi", flip_largest_coefficient(store.series("Phi", 4), 2))
        result = verify_phi_duality(faulty, degree=4, tolerance=TEST_TOL)
        assert not result.passed
        assert result.residual_by_degree[1] < TEST_TOL
        assert abs(result.residual_by_degree[2] - 2 * mpmath.zeta(2)) < 1e-15
        assert result.tail_bound == 0


class TestSuiteChecks:
    def test_grouplike(self, store):
        assert verify_grouplike("grouplike-phi", store, degree=4, tolerance=TEST_TOL).passed
        assert verify_grouplike("grouplike-psi2", store, degree=3, tolerance=TEST_TOL).passed

    def test_automorphism_presentation(self, store):
        result = verify_automorphism_presentation(store)
        assert result.passed
        assert all(result.notes["checks"].values())

    def test_t4_presentation(self, store):
        result = verify_t4_presentation(store, degree=3)
        assert result.passed
        assert result.notes["dimensions"] == [1, 6, 25, 90]

    @pytest.mark.parametrize("name", ["ns1-connection", "ns2-connection"])
    def test_changes_of_variable(self, store, name):
        result = verify_connection_change(name, store, degree=3, tolerance=TEST_TOL)
        assert result.passed, result.residual


class TestCenterModulo:
    def test_central_exponential_is_trivial_modulo_the_center(self, table):
        g = exp(Series.lie(T4, {"Z": 1}, 3, 128, table) * mpmath.mpf("0.5"))
        assert residual_norm(g) > 0.1
        assert residual_modulo_center(g) < 1e-30


class TestCatalogueRuns:
    def test_empty_catalogue_passes(self, store, tmp_path):
        path = write_catalogue(tmp_path, "# nothing to check\n")
        report = verify_all(RunConfig(command="verify-all", catalogue=path), store)
        assert report.rows == []
        assert report.passed

    def test_custom_catalogue(self, store, tmp_path):
        path = write_catalogue(
            tmp_path,
            "phi-duality: Phi(B, A) Phi == 1\nns1: Phi == 2^{B} Psi2(A | B, -A-B) 2^{A}\n",
        )
        config = RunConfig(command="verify-all", catalogue=path, degree=4, tolerance=TEST_TOL)
        report = verify_all(config, store)
        assert [r.name for r in report.rows] == ["ns1", "phi-duality"]
        assert report.passed

    def test_relation_selection(self, store):
        config = RunConfig(command="verify-all", degree=3, tolerance=TEST_TOL,
                           relations=("okuda-psi4",))
        report = verify_all(config, store)
        assert [r.name for r in report.rows] == ["okuda-psi4"]

    def test_group_selection_runs_every_reading(self, store):
        config = RunConfig(command="verify-all", degree=3, tolerance=TEST_TOL,
                           relations=("distributivity-pi-phi",))
        report = verify_all(config, store)
        assert [r.name for r in report.rows] == [
            "distributivity-pi-phi@pi41",
            "distributivity-pi-phi@pi42",
        ]
        assert report.passed

    def test_unknown_relation(self, store):
        config = RunConfig(command="verify-all", relations=("nope",))
        with pytest.raises(ConfigError, match="nope"):
            verify_all(config, store)

    def test_level_selection(self, store):
        config = RunConfig(command="verify", N=1, degree=5, tolerance=TEST_TOL)
        report = verify_all(config, store, level=1)
        assert [r.name for r in report.rows] == ["grouplike-phi", "phi-duality", "phi-half"]
        assert report.passed

    def test_failing_relation_is_reported(self, store, tmp_path):
        path = write_catalogue(tmp_path, "broken: Phi == 2^{A} Phi\n")
        report = verify_all(RunConfig(command="verify-all", catalogue=path, degree=2), store)
        assert not report.passed
        assert report.failures() == ["broken"]
        assert report.render_text().endswith("1 rows, FAILED: broken\n")


class TestReports:
    def test_group_needs_exactly_one_reading(self):
        one = VerificationReport([row("g@x", 0), row("g@y", 1)])
        assert one.groups()["g"]["reading"] == "x"
        assert one.passed
        both = VerificationReport([row("g@x", 0), row("g@y", 0)])
        assert not both.passed
        assert both.failures() == ["g"]
        neither = VerificationReport([row("g@x", 1), row("g@y", 1)])
        assert neither.groups()["g"]["reading"] is None

    def test_rows_are_sorted(self):
        report = VerificationReport([row("b", 0), row("a", 0)])
        assert [r.name for r in report.rows] == ["a", "b"]

    def test_render_text(self):
        text = VerificationReport([row("a", 0), row("g@x", 0), row("g@y", 1)]).render_text()
        assert "group g: x=pass, y=fail -> holds as x" in text
        assert text.endswith("3 rows, all relations hold\n")

    def test_round_trip(self, store, tmp_path):
        path = write_catalogue(tmp_path, "phi-duality: Phi(B, A) Phi == 1\n")
        config = RunConfig(command="verify-all", catalogue=path, degree=3, tolerance=TEST_TOL)
        report = verify_all(config, store)
        restored = VerificationReport.from_document(report.serialize())
        assert restored.to_document(include_metadata=False) == report.to_document(
            include_metadata=False
        )

    def test_reports_are_reproducible(self, store, tmp_path):
        path = write_catalogue(tmp_path, "ns2: Phi == 4^{B} Psi2(A | 2B, -2(A+B)) 4^{A}\n")
        config = RunConfig(command="verify-all", catalogue=path, degree=3, tolerance=TEST_TOL)
        first = verify_all(config, store).serialize(include_metadata=False)
        second = verify_all(config, store).serialize(include_metadata=False)
        assert first == second
        assert "wall_time" not in json.loads(first)

    def test_not_a_report(self):
        with pytest.raises(SeriesFormatError):
            VerificationReport.from_document('{"format": "something else"}')


class TestStoreCache:
    def test_series_are_read_back(self, tmp_path, monkeypatch):
        cache = DiskCache(tmp_path)
        first = AssociatorStore(prec=64, terms=20, cache=cache, compute_degrees={1: 2})
        phi = first.series("Phi", 2)

        def no_compute(*args, **kwargs):
            raise AssertionError("recomputed a cached series")

        monkeypatch.setattr("kzassoc.relations.psi_holonomy", no_compute)
        second = AssociatorStore(prec=64, terms=20, cache=cache, compute_degrees={1: 2})
        cached = second.series("Phi", 2)
        for k in range(3):
            assert list(cached.homogeneous(k)) == list(phi.homogeneous(k))

    def test_tables_are_read_back(self, tmp_path, monkeypatch):
        cache = DiskCache(tmp_path)
        AssociatorStore(cache=cache).table(2)

        def no_build(*args, **kwargs):
            raise AssertionError("rebuilt a cached table")

        monkeypatch.setattr("kzassoc.relations.build_normal_forms", no_build)
        assert AssociatorStore(cache=cache).table(2).dimensions() == [1, 6, 25]

    def test_different_precision_is_a_different_entry(self, tmp_path):
        cache = DiskCache(tmp_path)
        AssociatorStore(prec=64, terms=20, cache=cache, compute_degrees={1: 2}).series("Phi", 2)
        AssociatorStore(prec=96, terms=20, cache=cache, compute_degrees={1: 2}).series("Phi", 2)
        assert len(list(tmp_path.glob("series-*.json"))) == 2

    def test_replace_leaves_the_original(self, store):
        phi = store.series("Phi", 3)
        faulty = store.replace("Phi", flip_largest_coefficient(phi, 2))
        assert coefficient_norm(store.series("Phi", 3) - phi) == 0
        assert coefficient_norm(faulty.series("Phi", 3) - phi) > 1

    def test_replace_does_not_share_computed_series(self):
        original = AssociatorStore(prec=64, terms=20, compute_degrees={1: 2, 2: 2})
        phi = original.series("Phi", 2)
        faulty = original.replace("Phi", flip_largest_coefficient(phi, 2))
        faulty.series("Psi2", 2)
        assert "Psi2" in faulty._holonomies
        assert "Psi2" not in original._holonomies


@pytest.mark.slow
def test_oracle_comparison(store):
    rows = oracle_comparison(2, 2, store)
    assert len(rows) == 1 + 3 + 9
    assert max(difference for *_, difference in rows) < 1e-4


@pytest.mark.slow
def test_default_suite_passes():
    report = verify_all(RunConfig(command="verify-all"))
    assert report.passed, report.failures()
    assert report.groups()["distributivity-pi-phi"]["reading"] == "pi41"
    assert len(report.rows) == 14 + 7


@pytest.mark.slow
@pytest.mark.parametrize("verifier", [verify_hexagon_psi4, verify_ns1])
def test_residuals_are_stable_in_the_number_of_terms(verifier):
    low = verifier(AssociatorStore(terms=120))
    high = verifier(AssociatorStore(terms=140))
    assert low.passed and high.passed
    assert abs(float(low.residual) - float(high.residual)) < 1e-30
