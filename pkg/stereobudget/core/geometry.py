"""
Exact two-camera geometry in the horizontal epipolar plane.

The rig midpoint is the origin, the forward axis is +Z and the cameras sit at
x = -B/2 (left) and x = +B/2 (right). An object at range R and bearing theta
(measured at the midpoint) sits at X = R sin(theta), Z = R cos(theta).
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from stereobudget.core.errors import DomainError, NoSolutionError
from stereobudget.core.projection import CameraIntrinsics, LensProjection, project

log = logging.getLogger(__name__)

MAX_RANGE_M = 1e7
BISECTION_TOLERANCE_PX = 1e-12
BISECTION_MAX_ITERATIONS = 200


@dataclass(frozen=True)
class StereoRig:
    baseline_m: float
    intrinsics: CameraIntrinsics
    projection: LensProjection

    def __post_init__(self):
        if not self.baseline_m > 0:
            raise DomainError(f"baseline_m must be positive, got {self.baseline_m}")
        self.intrinsics.check_projection(self.projection)

    @property
    def focal_px(self) -> float:
        return self.intrinsics.focal_px

    def with_projection(self, projection: LensProjection) -> "StereoRig":
        """Same focal length and baseline under another projection law."""
        if projection is self.projection:
            return self
        intrinsics = CameraIntrinsics.from_focal(
            projection,
            self.intrinsics.focal_px,
            self.intrinsics.sensor_width_px,
            self.intrinsics.pixel_pitch_um,
        )
        return StereoRig(self.baseline_m, intrinsics, projection)

    def with_baseline(self, baseline_m: float) -> "StereoRig":
        return StereoRig(baseline_m, self.intrinsics, self.projection)


@dataclass(frozen=True)
class ObjectPose:
    range_m: float
    bearing_rad: float

    def __post_init__(self):
        if not self.range_m > 0:
            raise DomainError(f"range_m must be positive, got {self.range_m}")
        if not abs(self.bearing_rad) < math.pi / 2:
            raise DomainError(f"bearing must lie in (-pi/2, pi/2), got {self.bearing_rad} rad")
        if not self.depth_m > 0:
            raise DomainError(f"pose depth must be positive (range {self.range_m}, bearing {self.bearing_rad})")

    @classmethod
    def from_depth(cls, depth_m: float, bearing_rad: float) -> "ObjectPose":
        if not depth_m > 0:
            raise DomainError(f"depth_m must be positive, got {depth_m}")
        if not abs(bearing_rad) < math.pi / 2:
            raise DomainError(f"bearing must lie in (-pi/2, pi/2), got {bearing_rad} rad")
        return cls(depth_to_range(depth_m, bearing_rad), bearing_rad)

    @property
    def depth_m(self) -> float:
        return range_to_depth(self.range_m, self.bearing_rad)


def depth_to_range(depth_m, bearing_rad):
    return depth_m / np.cos(bearing_rad)


def range_to_depth(range_m, bearing_rad):
    return range_m * np.cos(bearing_rad)


def effective_baseline(baseline_m: float, bearing_rad: float) -> float:
    """Baseline component perpendicular to the line of sight."""
    if not baseline_m > 0:
        raise DomainError(f"baseline_m must be positive, got {baseline_m}")
    if not abs(bearing_rad) < math.pi / 2:
        raise DomainError(f"bearing must lie in (-pi/2, pi/2), got {bearing_rad} rad")
    return baseline_m * math.cos(bearing_rad)


def _bearings(baseline_m: float, range_m, bearing_rad):
    lateral = range_m * np.sin(bearing_rad)
    depth = range_m * np.cos(bearing_rad)
    half = baseline_m / 2
    return np.arctan((lateral + half) / depth), np.arctan((lateral - half) / depth)


def _disparity(rig: StereoRig, range_m, bearing_rad):
    theta_left, theta_right = _bearings(rig.baseline_m, range_m, bearing_rad)
    return project(rig.projection, rig.focal_px, theta_left) - project(rig.projection, rig.focal_px, theta_right)


def camera_bearings(rig: StereoRig, pose: ObjectPose) -> Tuple[float, float]:
    """Ray angles from the left and right cameras; left is always the larger."""
    theta_left, theta_right = _bearings(rig.baseline_m, pose.range_m, pose.bearing_rad)
    return float(theta_left), float(theta_right)


def disparity(rig: StereoRig, pose: ObjectPose) -> float:
    """Total disparity in pixels, the sum of both cameras' displacements."""
    try:
        return float(_disparity(rig, pose.range_m, pose.bearing_rad))
    except DomainError as e:
        raise DomainError(
            f"Object at range {pose.range_m:.6g} m, bearing {math.degrees(pose.bearing_rad):.6g} deg "
            f"is outside the {rig.projection.value} field of view: {e}"
        ) from e


def achievable_disparity(rig: StereoRig, bearing_rad: float) -> Tuple[float, float]:
    """Disparity interval reachable for ranges in [B, MAX_RANGE_M] at ``bearing_rad``."""
    low = float(_disparity(rig, MAX_RANGE_M, bearing_rad))
    high = float(_disparity(rig, rig.baseline_m, bearing_rad))
    return low, high


def invert_disparities(rig: StereoRig, bearing_rad: float, d) -> np.ndarray:
    """
    Vectorized bisection on range. Entries outside the achievable interval
    come back as NaN.

    Each element's search only depends on its own target, so results do not
    depend on how the input is batched.
    """
    if not abs(bearing_rad) < math.pi / 2:
        raise DomainError(f"bearing must lie in (-pi/2, pi/2), got {bearing_rad} rad")
    target = np.atleast_1d(np.asarray(d, dtype=float))
    low_d, high_d = achievable_disparity(rig, bearing_rad)

    valid = (target > low_d) & (target < high_d)
    lo = np.full(target.shape, rig.baseline_m)
    hi = np.full(target.shape, MAX_RANGE_M)
    mid = (lo + hi) / 2
    active = valid.copy()

    iterations = 0
    while active.any() and iterations < BISECTION_MAX_ITERATIONS:
        iterations += 1
        mid = np.where(active, (lo + hi) / 2, mid)
        residual = _disparity(rig, mid, bearing_rad) - target
        done = active & ((np.abs(residual) <= BISECTION_TOLERANCE_PX) | (mid <= lo) | (mid >= hi))
        # disparity falls with range, so a positive residual puts the root further out
        move_lo = active & ~done & (residual > 0)
        move_hi = active & ~done & (residual <= 0)
        lo = np.where(move_lo, mid, lo)
        hi = np.where(move_hi, mid, hi)
        active &= ~done

    log.debug("disparity inversion: %d targets, %d iterations, %d unsolved",
              target.size, iterations, int(active.sum()))
    return np.where(valid, mid, np.nan)


def range_from_disparity(rig: StereoRig, bearing_rad: float, d: float) -> float:
    """Range whose disparity at ``bearing_rad`` equals ``d``."""
    low_d, high_d = achievable_disparity(rig, bearing_rad)
    if not low_d < d < high_d:
        raise NoSolutionError(
            f"Disparity {d} px has no range solution at bearing {math.degrees(bearing_rad):.6g} deg",
            (low_d, high_d),
        )
    return float(invert_disparities(rig, bearing_rad, d)[0])
