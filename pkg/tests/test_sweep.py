import math

import numpy as np
import pytest

from uwqkd.channel import ChannelScenario
from uwqkd.config import OPTIMAL_SYSTEM, ORDINARY_SYSTEM
from uwqkd.csvio import csv_text
from uwqkd.errors import InfeasibleQueryError, ParameterValidationError
from uwqkd.keyrate import ProtocolParams
from uwqkd.qber import SystemParams
from uwqkd.radiance import RadianceTable
from uwqkd.sweep import (KEYRATE_COLUMNS, QBER_COLUMNS, LinkSetup, MaxDistanceQuery, SweepSpec,
                         evaluate_point, max_secure_distance, sweep)


def setup_for(mode, system=ORDINARY_SYSTEM, protocol=None, **scenario):
    scenario.setdefault("chi_c", system.chi_c)
    return LinkSetup(system, ChannelScenario(mode=mode, **scenario), protocol=protocol or ProtocolParams())


def test_two_steps_give_the_endpoints(bundled_table) -> None:
    result = sweep(SweepSpec("distance", 0.0, 100.0, 2), setup_for("U"), bundled_table)
    assert [row["r_m"] for row in result.rows] == [0.0, 100.0]
    assert result.columns == ["r_m"] + list(QBER_COLUMNS)
    assert result.errors == [] and result.clamped == 0


def test_sweep_columns_follow_outputs() -> None:
    spec = SweepSpec("aperture", 1.0, 100.0, 10, outputs=("secure", "sifted", "qber_breakdown"))
    assert spec.column == "A_cm2"
    assert spec.columns() == ["A_cm2"] + list(QBER_COLUMNS) + list(KEYRATE_COLUMNS)
    assert SweepSpec("fov", 1.0, 2.0, 2, outputs="sifted").columns() == ["gamma_mrad", "sifted_bps"]


@pytest.mark.parametrize("kwargs", [
    {"variable": "depth"},
    {"start": 10.0, "stop": 10.0},
    {"steps": 1},
    {"steps": 2.5},
    {"outputs": ("qber",)},
    {"outputs": ()},
    {"method": "twodecoy"},
    {"start": -5.0},
])
def test_sweep_spec_validation(kwargs) -> None:
    values = dict(variable="distance", start=0.0, stop=100.0, steps=11)
    values.update(kwargs)
    with pytest.raises(ParameterValidationError):
        SweepSpec(**values)


def test_fov_sweep_crosses_threshold(bundled_table) -> None:
    result = sweep(SweepSpec("fov", 5.0, 25.0, 201), setup_for("D"), bundled_table)
    gamma = np.array([row["gamma_mrad"] for row in result.rows])
    qber = np.array([row["q_total"] for row in result.rows])
    assert np.all(np.diff(qber) > 0.0)
    crossing = gamma[np.argmax(qber > 0.11)]
    assert 11.0 < crossing < 16.0


@pytest.mark.parametrize("mode", ["U", "H"])
def test_aperture_sweep_is_nearly_affine(bundled_table, mode) -> None:
    result = sweep(SweepSpec("aperture", 1.0, 100.0, 100), setup_for(mode), bundled_table)
    area = np.array([row["A_cm2"] for row in result.rows])
    qber = np.array([row["q_total"] for row in result.rows])
    fit = np.polyval(np.polyfit(area, qber, 1), area)
    r_squared = 1.0 - np.sum((qber - fit) ** 2) / np.sum((qber - qber.mean()) ** 2)
    assert r_squared > 0.999


def test_sweep_rows_match_single_points(bundled_table, make_link) -> None:
    spec = SweepSpec("distance", 0.0, 300.0, 7, outputs=("qber_breakdown", "sifted", "secure"))
    setup = setup_for("H", protocol=ProtocolParams(mu=0.48))
    result = sweep(spec, setup, bundled_table)
    link = make_link("H")
    for row in result.rows:
        assert row["q_total"] == pytest.approx(link.qber(row["r_m"]).total, rel=1e-12)
    assert result.rows[0]["sifted_bps"] > result.rows[-1]["sifted_bps"]
    assert all(row["secure_bps"] <= row["sifted_bps"] for row in result.rows)


def test_parallel_sweep_keeps_grid_order(bundled_table) -> None:
    spec = SweepSpec("distance", 0.0, 400.0, 41, outputs=("qber_breakdown", "sifted"))
    serial = sweep(spec, setup_for("D"), bundled_table)
    parallel = sweep(spec, setup_for("D"), bundled_table, workers=2)
    assert parallel.columns == serial.columns
    assert csv_text(parallel.rows, parallel.columns) == csv_text(serial.rows, serial.columns)


def test_sweep_csv_is_deterministic(bundled_table) -> None:
    spec = SweepSpec("distance", 0.0, 500.0, 51, outputs=("qber_breakdown", "secure"))
    first = sweep(spec, setup_for("U"), bundled_table)
    second = sweep(spec, setup_for("U"), bundled_table)
    assert csv_text(first.rows, first.columns).encode() == csv_text(second.rows, second.columns).encode()


def test_failed_rows_get_an_error_column(dark_table) -> None:
    system = SystemParams(I_dc=0.0, chi_c=0.18)
    spec = SweepSpec("distance", 0.0, 10000.0, 2)
    result = sweep(spec, LinkSetup(system, ChannelScenario(chi_c=0.18)), dark_table)
    assert result.columns[-1] == "error"
    assert result.rows[0]["error"] == ""
    assert "no counts" in result.rows[1]["error"]
    assert math.isnan(result.rows[1]["q_total"])
    assert [i for i, _ in result.errors] == [1]


def test_evaluate_point_reports_clamping(bundled_table) -> None:
    row = evaluate_point(SweepSpec("distance", 0.0, 2000.0, 2), setup_for("D"), bundled_table, 1500.0)
    assert row.clamped and row.error is None


def test_fov_and_aperture_points_change_the_receiver() -> None:
    setup = setup_for("U")
    system, geometry, r = setup.point("fov", 20.0, 150.0)
    assert (geometry.gamma, system.gamma, r) == (pytest.approx(0.02), pytest.approx(0.02), 150.0)
    system, geometry, r = setup.point("aperture", 50.0, 150.0)
    assert geometry.aperture == pytest.approx(50e-4) and system.A == pytest.approx(50e-4)
    assert setup.point("distance", 75.0, 150.0)[2] == 75.0


@pytest.mark.parametrize("mode, expected", [("D", 134.0), ("U", 189.6), ("H", 200.1)])
def test_ordinary_max_distance(bundled_table, mode, expected) -> None:
    result = max_secure_distance(MaxDistanceQuery(), setup_for(mode), bundled_table)
    assert result.distance == pytest.approx(expected, rel=0.2)
    assert result.monotone
    lo, hi = result.bracket
    assert lo <= result.distance <= hi


def test_legacy_max_distance_is_shorter(bundled_table) -> None:
    legacy = max_secure_distance(MaxDistanceQuery(legacy=True), setup_for("D"), bundled_table)
    assert legacy.distance == pytest.approx(35.0, rel=0.15)


# Dark counts set these crossings; DESIGN.md records how they compare with 310 to 340 m.
@pytest.mark.parametrize("mode, expected", [("D", 401.7), ("U", 385.6), ("H", 402.2)])
def test_optimal_max_distance(bundled_table, mode, expected) -> None:
    result = max_secure_distance(MaxDistanceQuery(), setup_for(mode, OPTIMAL_SYSTEM), bundled_table)
    assert result.distance == pytest.approx(expected, rel=5e-3)


@pytest.mark.parametrize("mode, expected", [("D", 32.7), ("U", 33.7), ("H", 34.0)])
def test_turbid_water_shortens_the_range(bundled_table, mode, expected) -> None:
    clear = max_secure_distance(MaxDistanceQuery(), setup_for(mode), bundled_table).distance
    turbid = max_secure_distance(MaxDistanceQuery(), setup_for(mode, ORDINARY_SYSTEM.replace(chi_c=0.18),
                                                                  water_type="II"), bundled_table).distance
    assert 0.0 < turbid < clear
    assert turbid < 100.0
    assert turbid == pytest.approx(expected, abs=1.0)


def test_suggested_background_decay_moves_the_downward_crossing() -> None:
    # K_d = 0.8 chi_c dims the background with depth faster than the bundled 0.5.
    table = RadianceTable.synthesize(0.8)
    result = max_secure_distance(MaxDistanceQuery(), setup_for("D"), table)
    assert result.distance == pytest.approx(188.9, rel=1e-2)
    assert result.monotone


def test_result_meets_the_criterion_within_tolerance(bundled_table, make_link) -> None:
    query = MaxDistanceQuery(tolerance=0.01)
    result = max_secure_distance(query, setup_for("U"), bundled_table)
    link = make_link("U")
    assert link.qber(result.distance).total <= 0.11
    assert link.qber(result.distance + 0.01).total > 0.11


def test_halving_tolerance_refines_the_result(bundled_table) -> None:
    coarse = max_secure_distance(MaxDistanceQuery(tolerance=1.0), setup_for("H"), bundled_table).distance
    fine = max_secure_distance(MaxDistanceQuery(tolerance=0.5), setup_for("H"), bundled_table).distance
    assert abs(fine - coarse) <= 1.0
    assert fine >= coarse


def test_rate_criterion(bundled_table) -> None:
    query = MaxDistanceQuery(criterion="rate", method="onedecoy")
    setup = setup_for("U", protocol=ProtocolParams(mu=0.48))
    result = max_secure_distance(query, setup, bundled_table)
    assert 100.0 < result.distance < 300.0


def test_threshold_at_one_half_exceeds_the_cap(bundled_table) -> None:
    with pytest.raises(InfeasibleQueryError, match="exceeds cap"):
        max_secure_distance(MaxDistanceQuery(threshold=0.5), setup_for("U"), bundled_table)


def test_large_misalignment_is_infeasible_at_zero_range(bundled_table) -> None:
    setup = setup_for("U", ORDINARY_SYSTEM.replace(P=0.2))
    with pytest.raises(InfeasibleQueryError, match="infeasible at zero range"):
        max_secure_distance(MaxDistanceQuery(), setup, bundled_table)


@pytest.mark.parametrize("kwargs", [
    {"criterion": "loss"},
    {"threshold": 0.0},
    {"threshold": 0.6},
    {"tolerance": 0.0},
    {"cap": -1.0},
    {"method": "sifted"},
])
def test_max_distance_query_validation(kwargs) -> None:
    with pytest.raises(ParameterValidationError):
        MaxDistanceQuery(**kwargs)
