"""Self-validation machinery: randomized oracles, limits, report schema."""

import math

import jsonschema
import pytest

from spdc_turbulence import (
    FULLY_COHERENT,
    ChannelParams,
    CrystalParams,
    PumpParams,
    run_validation,
)
from spdc_turbulence.validation import (
    DEFAULT_SEED,
    REPORT_SCHEMA,
    closed_form_discrepancy_entries,
    coherent_limit_deviation,
    draw_parameter_sets,
    oracle_equivalence_deviation,
    turbulence_free_deviation,
)

EXPECTED_CHECKS = {
    "gaussian_identities",
    "quadrature_identities",
    "oracle_equivalence",
    "reference_point",
    "coherent_limit",
    "turbulence_free_limit",
    "engine_parity",
    "turbulence_monotonicity",
}


def test_draw_parameter_sets_deterministic():
    first = draw_parameter_sets(6, seed=DEFAULT_SEED)
    second = draw_parameter_sets(6, seed=DEFAULT_SEED)
    assert first == second
    different = draw_parameter_sets(6, seed=DEFAULT_SEED + 1)
    assert different != first


def test_draw_parameter_sets_ranges():
    sets = draw_parameter_sets(20)
    coherent = 0
    for pump, crystal, channel in sets:
        assert 1e-4 <= pump.sigma <= 5e-3
        if pump.is_fully_coherent:
            coherent += 1
        else:
            assert 1e-5 <= pump.delta <= 1e-3
        assert 1e-16 <= channel.cn2 <= 1e-13
        assert 1e3 <= channel.z <= 20e3
        assert crystal.gamma > 0
    assert 0 < coherent < 20


def test_oracle_equivalence_at_reference():
    pump = PumpParams(delta=0.0876e-3)
    channel = ChannelParams(cn2=1e-14, z=20e3)
    dev = oracle_equivalence_deviation(pump, CrystalParams(), channel, rel_tol=1e-4)
    assert dev < 1e-3


def test_coherent_limit_small_by_default():
    dev = coherent_limit_deviation()
    assert dev < 1e-4


def test_turbulence_free_limit_small():
    dev = turbulence_free_deviation()
    assert dev < 1e-4
    # and it really compares against an exactly-zero-cn2 baseline
    dev_loose = turbulence_free_deviation(cn2_small=1e-16)
    assert dev_loose > dev


def test_discrepancy_entries_document_printed_route():
    entries = closed_form_discrepancy_entries()
    assert len(entries) == 24  # fig2-fig4 scenarios
    labels = {e["label"] for e in entries}
    assert len(labels) == 24
    assert any("fig2" in label for label in labels)
    assert any("fig4" in label for label in labels)
    for entry in entries:
        assert entry["n_points"] >= 9
        assert entry["fingerprint"]
        # deviations are recorded, never thresholded
        if entry["max_rel_deviation"] is not None:
            assert entry["max_rel_deviation"] >= 0.0
            assert entry["mean_rel_deviation"] <= entry["max_rel_deviation"]
        assert entry["parity_violation"] >= 0.0
        assert entry["overflow_points"] >= 0


def test_run_validation_passes_and_matches_schema():
    report = run_validation(oracle_sets=3, include_discrepancy=True)
    jsonschema.validate(report, REPORT_SCHEMA)
    assert report["schema_version"] == 1
    assert report["passed"] is True
    assert {c["name"] for c in report["checks"]} == EXPECTED_CHECKS
    for check in report["checks"]:
        assert check["passed"], check
        # trend checks carry no relative number
        assert check["worst_rel"] is None or math.isfinite(check["worst_rel"])
    assert len(report["closed_form_discrepancy"]) == 24


def test_run_validation_discrepancy_optional():
    report = run_validation(oracle_sets=2, include_discrepancy=False)
    jsonschema.validate(report, REPORT_SCHEMA)
    assert report["closed_form_discrepancy"] == []


def test_validation_seed_changes_draws_not_verdict():
    a = run_validation(oracle_sets=2, seed=1, include_discrepancy=False)
    b = run_validation(oracle_sets=2, seed=2, include_discrepancy=False)
    assert a["passed"] and b["passed"]
    worst = lambda rep: {c["name"]: c["worst_rel"] for c in rep["checks"]}
    assert worst(a)["oracle_equivalence"] != worst(b)["oracle_equivalence"]
