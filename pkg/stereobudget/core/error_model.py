"""
First-order depth and range error for pinhole and equidistant fisheye rigs.

    pinhole   dZ = Z^2 dd / (f B)              dR = dZ / cos(theta)
    fisheye   dZ = Z^2 dd / (f B) (1 + tan^2)  dR = dZ / cos(theta)

theta is the object's bearing. All errors are reported as positive magnitudes.
"""
import math
from dataclasses import dataclass
from typing import Optional

from stereobudget.core.errors import DomainError
from stereobudget.core.geometry import ObjectPose, StereoRig, depth_to_range
from stereobudget.core.projection import LensProjection


@dataclass(frozen=True)
class ErrorQuery:
    depth_m: float
    bearing_rad: float
    disparity_error_px: float
    rig: StereoRig

    def __post_init__(self):
        errors = []
        if not self.depth_m > 0:
            errors.append(f"depth_m must be positive, got {self.depth_m}")
        if not self.disparity_error_px > 0:
            errors.append(f"disparity_error_px must be positive, got {self.disparity_error_px}")
        if not abs(self.bearing_rad) < math.pi / 2:
            errors.append(f"bearing must lie in (-pi/2, pi/2), got {self.bearing_rad} rad")
        if errors:
            raise DomainError("; ".join(errors))

    @property
    def range_m(self) -> float:
        return float(depth_to_range(self.depth_m, self.bearing_rad))


@dataclass(frozen=True)
class ErrorBudgetRow:
    bearing_rad: float
    depth_m: float
    range_m: float
    model: LensProjection
    analytic_depth_error_m: float
    analytic_range_error_m: float
    oracle_range_error_m: Optional[float] = None
    oracle_relative_deviation: Optional[float] = None
    sweep_value: Optional[float] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        """True when the analytic columns hold values (the oracle may still have failed)."""
        return not math.isnan(self.analytic_range_error_m)


def _base_error(q: ErrorQuery) -> float:
    return q.depth_m ** 2 * q.disparity_error_px / (q.rig.focal_px * q.rig.baseline_m)


def _sec_squared(bearing_rad: float) -> float:
    return 1.0 + math.tan(bearing_rad) ** 2


def depth_error_pinhole(q: ErrorQuery) -> float:
    return _base_error(q)


def range_error_pinhole(q: ErrorQuery) -> float:
    # dividing by cos(theta) is the same as using the effective baseline B cos(theta)
    return _base_error(q) / math.cos(q.bearing_rad)


def depth_error_fisheye(q: ErrorQuery) -> float:
    return _base_error(q) * _sec_squared(q.bearing_rad)


def range_error_fisheye(q: ErrorQuery) -> float:
    return _base_error(q) / math.cos(q.bearing_rad) * _sec_squared(q.bearing_rad)


def depth_to_range_error(depth_error_m: float, bearing_rad: float) -> float:
    if not depth_error_m > 0:
        raise DomainError(f"depth error must be positive, got {depth_error_m}")
    if not abs(bearing_rad) < math.pi / 2:
        raise DomainError(f"bearing must lie in (-pi/2, pi/2), got {bearing_rad} rad")
    return depth_error_m / math.cos(bearing_rad)


def depth_error(q: ErrorQuery) -> float:
    """Depth error for the query's rig projection."""
    match q.rig.projection:
        case LensProjection.PINHOLE:
            return depth_error_pinhole(q)
        case LensProjection.EQUIDISTANT_FISHEYE:
            return depth_error_fisheye(q)


def range_error(q: ErrorQuery) -> float:
    """Range error for the query's rig projection."""
    match q.rig.projection:
        case LensProjection.PINHOLE:
            return range_error_pinhole(q)
        case LensProjection.EQUIDISTANT_FISHEYE:
            return range_error_fisheye(q)


def analytic_row(rig: StereoRig, pose: ObjectPose, disparity_error_px: float) -> ErrorBudgetRow:
    """Budget row with the analytic columns filled; domain failures land in ``error``."""
    try:
        q = ErrorQuery(float(pose.depth_m), pose.bearing_rad, disparity_error_px, rig)
        return ErrorBudgetRow(
            bearing_rad=pose.bearing_rad,
            depth_m=q.depth_m,
            range_m=pose.range_m,
            model=rig.projection,
            analytic_depth_error_m=depth_error(q),
            analytic_range_error_m=range_error(q),
        )
    except DomainError as e:
        return ErrorBudgetRow(
            bearing_rad=pose.bearing_rad,
            depth_m=float(pose.depth_m),
            range_m=pose.range_m,
            model=rig.projection,
            analytic_depth_error_m=math.nan,
            analytic_range_error_m=math.nan,
            error=str(e),
        )


def centerline_depth_error_fisheye(rig: StereoRig, depth_m: float, disparity_error_px: float) -> float:
    """
    Fisheye depth error for an object on the rig centerline, where the
    per-camera angle satisfies tan(theta) = (B/2)/Z. This is the exact
    first-order error of the equidistant disparity 2 f arctan(B / 2Z).
    """
    q = ErrorQuery(depth_m, 0.0, disparity_error_px, rig)
    half_angle_tan = (rig.baseline_m / 2) / depth_m
    return _base_error(q) * (1.0 + half_angle_tan ** 2)


def required_disparity_error(q: ErrorQuery, target_range_error_m: float) -> float:
    """Disparity error (px) at which the query's range error equals the target."""
    if not target_range_error_m > 0:
        raise DomainError(f"target range error must be positive, got {target_range_error_m}")
    # range error is linear in the disparity error
    return q.disparity_error_px * target_range_error_m / range_error(q)


def coverage_half_angle(
    rig: StereoRig,
    depth_m: float,
    disparity_error_px: float,
    budget_m: float,
) -> Optional[float]:
    """
    Largest |bearing| (radians) at which the analytic range error stays within
    ``budget_m`` for objects at ``depth_m``. None when even the on-axis error
    exceeds the budget.
    """
    if not budget_m > 0:
        raise DomainError(f"budget must be positive, got {budget_m}")
    base = _base_error(ErrorQuery(depth_m, 0.0, disparity_error_px, rig))
    if base > budget_m:
        return None

    ratio = base / budget_m
    match rig.projection:
        case LensProjection.PINHOLE:
            return math.acos(ratio)
        case LensProjection.EQUIDISTANT_FISHEYE:
            # 1 / cos * (1 + tan^2) == 1 / cos^3
            return math.acos(ratio ** (1.0 / 3.0))
