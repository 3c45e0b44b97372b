"""
Tests for stereobudget.core.sweep
"""
import json
import logging
import math
from dataclasses import replace

import pytest

from stereobudget.core.errors import SweepError
from stereobudget.core.projection import LensProjection
from stereobudget.core.scenario import build_scenario_config, bundled_scenario, bundled_scenario_text
from stereobudget.core.sweep import run_sweep, sweep_grid

PINHOLE = LensProjection.PINHOLE
FISHEYE = LensProjection.EQUIDISTANT_FISHEYE


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _config(rig=None, query=None, sweep=None, validation=None):
    raw = json.loads(bundled_scenario_text())
    for name, overrides in (("rig", rig), ("query", query), ("sweep", sweep), ("validation", validation)):
        if overrides:
            raw[name].update(overrides)
    return build_scenario_config(raw)


def _by_degrees(result):
    return {round(row.sweep_value): row for row in result.rows}


# ---------------------------------------------------------------------------
# Grid
# ---------------------------------------------------------------------------

def test_sweep_grid_is_inclusive():
    grid = sweep_grid(bundled_scenario())
    assert len(grid) == 86
    assert grid[0] == 0.0
    assert grid[-1] == 85.0
    assert grid[30] == 30.0


# ---------------------------------------------------------------------------
# Bundled 4K fisheye scenario
# ---------------------------------------------------------------------------

def test_bundled_sweep_rows():
    result = run_sweep(bundled_scenario())
    assert result.model is FISHEYE
    assert len(result.rows) == 86
    assert all(row.ok for row in result.rows)
    assert all(row.oracle_range_error_m is None for row in result.rows)
    assert result.monte_carlo is None


def test_bundled_sweep_stays_below_4cm_within_30_degrees():
    rows = _by_degrees(run_sweep(bundled_scenario()))
    for degrees in range(0, 31):
        assert rows[degrees].analytic_range_error_m < 0.04
    assert rows[30].analytic_range_error_m == pytest.approx(0.02519, abs=1e-4)
    assert rows[0].analytic_range_error_m == pytest.approx(0.016363, abs=1e-6)


def test_bundled_sweep_models_coincide_on_axis():
    config = bundled_scenario()
    fisheye = _by_degrees(run_sweep(config))
    pinhole = _by_degrees(run_sweep(config, projection=PINHOLE))
    assert fisheye[0].analytic_range_error_m == pytest.approx(pinhole[0].analytic_range_error_m, rel=1e-15)


def test_bundled_sweep_fisheye_is_sec_squared_times_pinhole():
    config = bundled_scenario()
    fisheye = run_sweep(config)
    pinhole = run_sweep(config, projection=PINHOLE)
    assert pinhole.model is PINHOLE
    for f_row, p_row in zip(fisheye.rows, pinhole.rows):
        sec_squared = 1 + math.tan(f_row.bearing_rad) ** 2
        assert f_row.analytic_range_error_m == pytest.approx(p_row.analytic_range_error_m * sec_squared, rel=1e-12)


def test_bundled_sweep_summary():
    summary = run_sweep(bundled_scenario()).summary
    assert math.degrees(summary.bearing_at_max_rad) == pytest.approx(85.0)
    assert summary.failed_rows == 0
    assert summary.max_oracle_deviation is None


# ---------------------------------------------------------------------------
# Other sweep variables
# ---------------------------------------------------------------------------

def test_depth_sweep_quadruples_per_doubling():
    result = run_sweep(_config(sweep={"variable": "depth_m", "start": 5, "stop": 40, "steps": 8}))
    rows = {row.sweep_value: row for row in result.rows}
    for depth in (5.0, 10.0, 20.0):
        ratio = rows[2 * depth].analytic_range_error_m / rows[depth].analytic_range_error_m
        assert ratio == pytest.approx(4.0, rel=1e-12)
    assert all(row.depth_m == row.sweep_value for row in result.rows)


def test_baseline_sweep_is_inverse_in_baseline():
    result = run_sweep(_config(
        query={"bearing_deg": 20.0},
        sweep={"variable": "baseline_m", "start": 0.5, "stop": 2.0, "steps": 4},
    ))
    first, last = result.rows[0], result.rows[-1]
    assert first.analytic_range_error_m / last.analytic_range_error_m == pytest.approx(4.0, rel=1e-12)
    assert math.degrees(first.bearing_rad) == pytest.approx(20.0)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def test_validation_fills_oracle_columns():
    result = run_sweep(bundled_scenario(), validate=True, monte_carlo=False)
    assert all(row.oracle_range_error_m is not None for row in result.rows)
    assert result.summary.max_oracle_deviation is not None
    assert result.monte_carlo is None
    on_axis = _by_degrees(result)[0]
    assert on_axis.oracle_relative_deviation == pytest.approx(0.0025, rel=0.01)


def test_validation_pinhole_deviation_is_negligible():
    config = _config(
        rig={"projection": "pinhole", "hfov_deg": 170},
        sweep={"start": 0, "stop": 80, "steps": 81},
    )
    result = run_sweep(config, validate=True, monte_carlo=False)
    assert result.summary.max_oracle_deviation <= 1e-8


def test_validation_flag_in_config_enables_oracle():
    result = run_sweep(_config(validation={"enabled": True}), monte_carlo=False)
    assert result.summary.max_oracle_deviation is not None


def test_validation_runs_monte_carlo_at_midpoint():
    config = _config(
        sweep={"start": 0, "stop": 60, "steps": 3},
        validation={"monte_carlo": {"sigma_px": 0.2, "samples": 20_000, "seed": 42}},
    )
    result = run_sweep(config, validate=True)
    midpoint = result.rows[1]
    assert result.monte_carlo is not None
    assert result.monte_carlo.sample_count == 20_000
    assert result.monte_carlo.true_range_m == pytest.approx(midpoint.range_m)
    assert result.monte_carlo.std_range_m == pytest.approx(midpoint.oracle_range_error_m, rel=0.05)


# ---------------------------------------------------------------------------
# Failures
# ---------------------------------------------------------------------------

def test_all_rows_failing_raises():
    config = bundled_scenario()
    broken = replace(config, query=replace(config.query, disparity_error_px=-0.2))
    with pytest.raises(SweepError, match="All 86 sweep rows failed"):
        run_sweep(broken)


def test_rows_outside_field_of_view_are_logged_once(caplog):
    config = _config(rig={"projection": "pinhole", "hfov_deg": 60}, sweep={"start": 0, "stop": 80, "steps": 9})
    with caplog.at_level(logging.WARNING, logger="stereobudget.core.sweep"):
        result = run_sweep(config)
    assert all(row.ok for row in result.rows)
    warnings = [r for r in caplog.records if "outside" in r.getMessage()]
    assert len(warnings) == 1
    assert "5 of 9" in warnings[0].getMessage()
