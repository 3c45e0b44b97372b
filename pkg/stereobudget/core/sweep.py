import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from stereobudget.core.error_model import ErrorBudgetRow, analytic_row
from stereobudget.core.errors import DomainError, SweepError
from stereobudget.core.geometry import ObjectPose, StereoRig
from stereobudget.core.oracle import MonteCarloSummary, deviation_report, monte_carlo_range_error
from stereobudget.core.projection import LensProjection
from stereobudget.core.scenario import ScenarioConfig

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepSummary:
    max_analytic_range_error_m: float
    bearing_at_max_rad: float
    max_oracle_deviation: Optional[float]
    failed_rows: int


@dataclass(frozen=True)
class SweepResult:
    config: ScenarioConfig
    model: LensProjection
    rows: List[ErrorBudgetRow]
    summary: SweepSummary
    monte_carlo: Optional[MonteCarloSummary] = None

    @property
    def variable(self) -> str:
        return self.config.sweep.variable

    @property
    def grid(self) -> List[float]:
        return [row.sweep_value for row in self.rows]


def sweep_grid(config: ScenarioConfig) -> List[float]:
    sweep = config.sweep
    return [float(v) for v in np.linspace(sweep.start, sweep.stop, sweep.steps)]


def _grid_point(config: ScenarioConfig, rig: StereoRig, value: float) -> Tuple[StereoRig, ObjectPose]:
    query = config.query
    match config.sweep.variable:
        case "bearing_deg":
            return rig, ObjectPose.from_depth(query.depth_m, math.radians(value))
        case "depth_m":
            return rig, ObjectPose.from_depth(value, math.radians(query.bearing_deg))
        case "baseline_m":
            return rig.with_baseline(value), ObjectPose.from_depth(query.depth_m, math.radians(query.bearing_deg))
        case other:
            raise DomainError(f"Unknown sweep variable '{other}'")


def _summarize(rows: List[ErrorBudgetRow]) -> SweepSummary:
    good = [row for row in rows if row.ok]
    worst = max(good, key=lambda row: row.analytic_range_error_m)
    deviations = [row.oracle_relative_deviation for row in good if row.oracle_relative_deviation is not None]
    return SweepSummary(
        max_analytic_range_error_m=worst.analytic_range_error_m,
        bearing_at_max_rad=worst.bearing_rad,
        max_oracle_deviation=max(deviations) if deviations else None,
        failed_rows=len(rows) - len(good),
    )


def run_sweep(
    config: ScenarioConfig,
    projection: Optional[LensProjection] = None,
    validate: Optional[bool] = None,
    monte_carlo: bool = True,
) -> SweepResult:
    """
    Evaluate the error budget over the configured grid.

    ``projection`` swaps the rig's projection law while keeping its focal
    length and baseline. ``validate`` overrides ``config.validation.enabled``;
    when validation is on the oracle columns are filled and, if configured and
    ``monte_carlo`` is set, a Monte Carlo run is made at the grid midpoint.
    """
    rig = config.stereo_rig()
    if projection is not None:
        rig = rig.with_projection(projection)
    if validate is None:
        validate = config.validation.enabled
    disparity_error = config.query.disparity_error_px

    log.info("sweeping %s over %s..%s (%d steps), %s rig, validation %s",
             config.sweep.variable, config.sweep.start, config.sweep.stop, config.sweep.steps,
             rig.projection.value, "on" if validate else "off")

    rows = []
    points = []
    outside_fov = 0
    for value in sweep_grid(config):
        try:
            point_rig, pose = _grid_point(config, rig, value)
        except DomainError as e:
            log.warning("grid point %s=%s failed: %s", config.sweep.variable, value, e)
            rows.append(ErrorBudgetRow(
                bearing_rad=math.nan, depth_m=math.nan, range_m=math.nan, model=rig.projection,
                analytic_depth_error_m=math.nan, analytic_range_error_m=math.nan,
                sweep_value=value, error=str(e),
            ))
            points.append(None)
            continue

        if abs(pose.bearing_rad) > point_rig.intrinsics.half_hfov_rad:
            outside_fov += 1

        if validate:
            row = deviation_report(point_rig, [pose], disparity_error, config.validation.fd_step_rel, [value])[0]
        else:
            row = analytic_row(point_rig, pose, disparity_error)
            row = replace(row, sweep_value=value)
        rows.append(row)
        points.append((point_rig, pose))

    if outside_fov:
        log.warning("%d of %d grid points lie outside the camera's %.2f deg half field of view",
                    outside_fov, len(rows), math.degrees(rig.intrinsics.half_hfov_rad))

    if not any(row.ok for row in rows):
        raise SweepError(f"All {len(rows)} sweep rows failed; first error: {rows[0].error}")

    mc_summary = None
    mc_config = config.validation.monte_carlo
    if validate and monte_carlo and mc_config is not None:
        midpoint = points[len(points) // 2]
        if midpoint is None:
            log.warning("grid midpoint failed; skipping Monte Carlo")
        else:
            point_rig, pose = midpoint
            mc_summary = monte_carlo_range_error(
                point_rig,
                pose,
                mc_config.sigma_px or disparity_error,
                mc_config.samples,
                mc_config.seed,
            )

    return SweepResult(
        config=config,
        model=rig.projection,
        rows=rows,
        summary=_summarize(rows),
        monte_carlo=mc_summary,
    )
