"""
Independent checks of the closed-form error model against the exact geometry:
finite differences of the disparity and Monte Carlo propagation of disparity
noise through the exact range inversion.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from stereobudget.core.error_model import ErrorBudgetRow, analytic_row
from stereobudget.core.errors import DomainError, OracleError
from stereobudget.core.geometry import ObjectPose, StereoRig, disparity, invert_disparities
from stereobudget.core.projection import LensProjection

log = logging.getLogger(__name__)

DEFAULT_STEP_REL = 1e-4
MIN_MONTE_CARLO_SAMPLES = 100
MAX_REJECTED_FRACTION = 0.01
DEFAULT_CHUNK_SIZE = 16384

# Each normal draw consumes two uniforms; Philox yields four 64-bit words per counter step.
_UNIFORMS_PER_SAMPLE = 2
_WORDS_PER_COUNTER = 4


def _check_step(pose: ObjectPose, step_m: float) -> None:
    if not step_m > 0:
        raise DomainError(f"finite-difference step must be positive, got {step_m}")
    if not pose.range_m - step_m > 0:
        raise DomainError(f"step {step_m} m would move the pose (range {pose.range_m} m) behind the rig")


def _central_difference(rig: StereoRig, pose: ObjectPose, step_m: float) -> float:
    near = ObjectPose(pose.range_m - step_m, pose.bearing_rad)
    far = ObjectPose(pose.range_m + step_m, pose.bearing_rad)
    return (disparity(rig, far) - disparity(rig, near)) / (2 * step_m)


def disparity_range_derivative_fd(
    rig: StereoRig,
    pose: ObjectPose,
    step_m: Optional[float] = None,
    extrapolate: bool = False,
) -> float:
    """
    d(disparity)/d(range) at fixed bearing, in px/m, by central differences.

    ``step_m`` defaults to 1e-4 of the range. With ``extrapolate`` the steps h
    and h/2 are combined (Richardson) to cancel the h^2 truncation term.
    """
    if step_m is None:
        step_m = DEFAULT_STEP_REL * pose.range_m
    _check_step(pose, step_m)

    coarse = _central_difference(rig, pose, step_m)
    if not extrapolate:
        return coarse
    fine = _central_difference(rig, pose, step_m / 2)
    return (4 * fine - coarse) / 3


def centerline_disparity_derivative(rig: StereoRig, depth_m: float) -> float:
    """Closed-form d(disparity)/dZ for an object on the rig centerline."""
    f, b = rig.focal_px, rig.baseline_m
    if rig.projection is LensProjection.PINHOLE:
        return -f * b / depth_m ** 2
    return -f * b / (depth_m ** 2 + (b / 2) ** 2)


def range_error_fd(
    rig: StereoRig,
    pose: ObjectPose,
    disparity_error_px: float,
    step_m: Optional[float] = None,
) -> float:
    """First-order range error from the numerically differentiated exact disparity."""
    if not disparity_error_px > 0:
        raise DomainError(f"disparity error must be positive, got {disparity_error_px}")
    slope = disparity_range_derivative_fd(rig, pose, step_m, extrapolate=True)
    return abs(disparity_error_px / slope)


@dataclass(frozen=True)
class MonteCarloSummary:
    mean_range_m: float
    std_range_m: float
    sample_count: int
    rejected_count: int
    true_range_m: float
    seed: int


def _standard_normals(seed: int, start: int, count: int) -> np.ndarray:
    """
    Box-Muller normals for sample indices [start, start + count). Sample i only
    ever uses uniforms 2i and 2i+1 of the Philox stream keyed by ``seed``.
    """
    first_word = start * _UNIFORMS_PER_SAMPLE
    bit_generator = np.random.Philox(key=seed)
    bit_generator.advance(first_word // _WORDS_PER_COUNTER)
    rng = np.random.Generator(bit_generator)
    skip = first_word % _WORDS_PER_COUNTER
    if skip:
        rng.random(skip)

    uniforms = rng.random(count * _UNIFORMS_PER_SAMPLE).reshape(count, _UNIFORMS_PER_SAMPLE)
    radius = np.sqrt(-2.0 * np.log1p(-uniforms[:, 0]))
    return radius * np.cos(2.0 * math.pi * uniforms[:, 1])


def monte_carlo_range_error(
    rig: StereoRig,
    pose: ObjectPose,
    disparity_sigma_px: float,
    samples: int = 100_000,
    seed: int = 42,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MonteCarloSummary:
    """
    Perturb the true disparity with N(0, sigma^2) noise, invert every noisy
    disparity to a range and report the spread. Chunking only bounds memory;
    the result is identical for any ``chunk_size``.
    """
    if samples < MIN_MONTE_CARLO_SAMPLES:
        raise DomainError(f"Monte Carlo needs at least {MIN_MONTE_CARLO_SAMPLES} samples, got {samples}")
    if not disparity_sigma_px > 0:
        raise DomainError(f"disparity sigma must be positive, got {disparity_sigma_px}")
    if not 0 <= seed < 2 ** 64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if chunk_size < 1:
        raise DomainError(f"chunk_size must be positive, got {chunk_size}")

    true_disparity = disparity(rig, pose)
    ranges = np.empty(samples)
    for start in range(0, samples, chunk_size):
        count = min(chunk_size, samples - start)
        noisy = true_disparity + disparity_sigma_px * _standard_normals(seed, start, count)
        ranges[start:start + count] = invert_disparities(rig, pose.bearing_rad, noisy)

    solved = ranges[~np.isnan(ranges)]
    rejected = samples - solved.size
    if rejected:
        log.warning("Monte Carlo rejected %d of %d samples (disparity not invertible)", rejected, samples)
    if rejected > MAX_REJECTED_FRACTION * samples:
        raise OracleError(
            f"Monte Carlo rejected {rejected} of {samples} samples; "
            f"sigma {disparity_sigma_px} px is too large for disparity {true_disparity:.6g} px"
        )

    return MonteCarloSummary(
        mean_range_m=float(np.mean(solved)),
        std_range_m=float(np.std(solved, ddof=1)),
        sample_count=int(solved.size),
        rejected_count=int(rejected),
        true_range_m=pose.range_m,
        seed=seed,
    )


def deviation_report(
    rig: StereoRig,
    sweep: Sequence[ObjectPose],
    disparity_error_px: float,
    step_rel: float = DEFAULT_STEP_REL,
    sweep_values: Optional[Sequence[float]] = None,
) -> List[ErrorBudgetRow]:
    """
    Analytic versus finite-difference range error for every pose. Poses the
    geometry cannot handle get a row with ``error`` set instead of aborting.
    """
    if not sweep:
        raise DomainError("deviation report needs at least one pose")

    rows = []
    for index, pose in enumerate(sweep):
        row = analytic_row(rig, pose, disparity_error_px)
        if sweep_values is not None:
            row = replace(row, sweep_value=sweep_values[index])
        if row.error is None:
            try:
                oracle = range_error_fd(rig, pose, disparity_error_px, step_rel * pose.range_m)
            except DomainError as e:
                log.warning("pose %d (bearing %.3f deg) has no oracle value: %s",
                            index, math.degrees(pose.bearing_rad), e)
                row = replace(row, error=str(e))
            else:
                row = replace(
                    row,
                    oracle_range_error_m=oracle,
                    oracle_relative_deviation=abs(row.analytic_range_error_m - oracle) / oracle,
                )
        rows.append(row)
    return rows
