"""
Test the verification suites end to end at small trial counts
"""
import pytest

from app.errors import DimensionError
from app.reports import canonical_dumps
from app.suites import (
    VERIFY_TARGETS,
    run_clifford,
    run_fock,
    run_gravity,
    run_maxwell,
    run_null_theorem,
    run_purity,
    run_wyler,
)


def test_verify_targets():
    assert sorted(VERIFY_TARGETS) == ["clifford", "gravity", "maxwell", "null-theorem", "purity"]


@pytest.mark.parametrize("n", [1, 3, 5])
def test_clifford_suite(run_config, n):
    result = run_clifford(run_config(n=n))

    assert result.passed, result.failures
    assert result.payload["n"] == n


@pytest.mark.parametrize("n", [3, 4])
def test_purity_suite(run_config, n):
    result = run_purity(run_config(n=n, trials=20))

    assert result.passed, result.failures
    assert result.payload["orbit_pure"] == 20


def test_purity_suite_rejects_n6(run_config):
    with pytest.raises(DimensionError, match="out of supported range"):
        run_purity(run_config(n=6))


@pytest.mark.parametrize("n", [2, 4])
def test_null_theorem_suite(run_config, n):
    result = run_null_theorem(run_config(n=n, trials=20))

    assert result.passed, result.failures
    assert len(result.payload["audit"]) == 8
    assert result.payload["decompositions"]


def test_maxwell_suite(run_config):
    result = run_maxwell(run_config(trials=20))

    report = result.report(run_config(trials=20))

    assert result.passed, result.failures
    assert report["passed"] is True
    assert report["failures"] == []
    assert {r["equation"] for r in report["records"]} == {"17a", "17b"}
    assert report["rank_two_fields"] == 20


def test_gravity_suite(run_config):
    result = run_gravity(run_config(trials=10))

    assert result.passed, result.failures
    assert all(r["equation"] == "19" for r in result.payload["records"])


def test_suites_are_deterministic(run_config):
    cfg = run_config(trials=5, seed=3)

    first = canonical_dumps(run_maxwell(cfg).report(cfg))
    second = canonical_dumps(run_maxwell(cfg).report(cfg))

    assert first == second


def test_fock_suite(run_config):
    result = run_fock(run_config(n_max=5))

    assert result.passed, result.failures
    assert len(result.tables["spectrum"]) == 5
    assert result.payload["balmer_ratios"][1] == 1.35
    nystrom = result.payload["nystrom"]
    assert [c["n"] for c in nystrom["clusters"]] == [1, 2, 3]
    assert all(c["relative_error"] <= 1e-3 for c in nystrom["clusters"])
    assert nystrom["energy_spread"] <= 1e-3
    assert nystrom["zonal_terms"] == 3
    assert list(result.tables["nystrom_spectrum"]["n"]) == [1, 2, 3]
    assert "Nystrom refinement" in [c["check"] for c in result.checks]


def test_fock_suite_fails_with_constant_subtraction_only(run_config):
    result = run_fock(run_config(n_max=3, nystrom_terms=1))

    assert not result.passed
    assert "Nystrom cluster n=3" in [f["check"] for f in result.failures]


def test_wyler_suite(run_config):
    result = run_wyler(run_config(mc_samples=1_000_000))

    assert result.passed, result.failures
    assert result.payload["inverse_alpha"] == pytest.approx(137.036082, abs=1e-6)


def test_wyler_suite_with_override_fails(run_config):
    result = run_wyler(run_config(mc_samples=100_000), {"V_Q5": 1.0})

    assert not result.passed
    assert result.payload["overridden"] == ["Q5"]
    assert "inverse alpha in [137.0, 137.1]" in [f["check"] for f in result.failures]


@pytest.mark.slow
@pytest.mark.parametrize("n", [4, 5])
def test_null_theorem_acceptance_scale(run_config, n):
    result = run_null_theorem(run_config(n=n, trials=1000, seed=7))

    assert result.passed, result.failures
