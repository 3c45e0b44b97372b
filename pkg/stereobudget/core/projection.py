"""
Projection laws mapping an incident ray angle to a signed radial image distance.

Two laws are supported:

    pinhole (rectilinear)      r = f * tan(theta)
    equidistant fisheye        r = f * theta

Angles are radians, radii and focal lengths are pixels. Every function accepts
either a scalar or a numpy array for the angle/radius argument.
"""
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from stereobudget.core.errors import DomainError

# Pinhole rays closer than this to the pole are rejected; tan() explodes there.
PINHOLE_POLE_GUARD = 1e-9
PINHOLE_LIMIT = math.pi / 2 - PINHOLE_POLE_GUARD

# Beyond roughly this angle equidistant rays depart strongly from a pinhole
# ray. Informational only.
FISHEYE_DEPARTURE_RAD = 1.16


class LensProjection(Enum):
    PINHOLE = "pinhole"
    EQUIDISTANT_FISHEYE = "fisheye"

    @classmethod
    def from_name(cls, name: str) -> "LensProjection":
        aliases = {"equidistant": cls.EQUIDISTANT_FISHEYE, "rectilinear": cls.PINHOLE}
        key = str(name).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            allowed = [p.value for p in cls]
            raise DomainError(f"Unknown projection '{name}'. Allowed: {allowed}") from None

    @property
    def other(self) -> "LensProjection":
        if self is LensProjection.PINHOLE:
            return LensProjection.EQUIDISTANT_FISHEYE
        return LensProjection.PINHOLE


def _check_focal(focal_px: float) -> None:
    if not focal_px > 0:
        raise DomainError(f"focal_px must be positive, got {focal_px}")


def _check_angles(proj: LensProjection, theta) -> None:
    magnitude = np.max(np.abs(theta)) if np.ndim(theta) else abs(theta)
    match proj:
        case LensProjection.PINHOLE:
            if not magnitude < PINHOLE_LIMIT:
                raise DomainError(
                    f"Pinhole projection is undefined at |theta| >= pi/2 (got {float(magnitude):.12g} rad)"
                )
        case LensProjection.EQUIDISTANT_FISHEYE:
            if not magnitude <= math.pi:
                raise DomainError(
                    f"Equidistant projection requires |theta| <= pi (got {float(magnitude):.12g} rad)"
                )


def project(proj: LensProjection, focal_px: float, theta):
    """Signed image radius in pixels for a ray at angle ``theta``."""
    _check_focal(focal_px)
    _check_angles(proj, theta)

    match proj:
        case LensProjection.PINHOLE:
            return focal_px * np.tan(theta)
        case LensProjection.EQUIDISTANT_FISHEYE:
            return focal_px * np.asarray(theta, dtype=float) if np.ndim(theta) else focal_px * float(theta)


def unproject(proj: LensProjection, focal_px: float, radius):
    """Ray angle for a signed image radius; inverse of :func:`project`."""
    _check_focal(focal_px)

    match proj:
        case LensProjection.PINHOLE:
            return np.arctan(np.divide(radius, focal_px))
        case LensProjection.EQUIDISTANT_FISHEYE:
            magnitude = np.max(np.abs(radius)) if np.ndim(radius) else abs(radius)
            if magnitude > focal_px * math.pi:
                raise DomainError(
                    f"Radius {float(magnitude):.6g} px exceeds the equidistant limit f*pi = {focal_px * math.pi:.6g} px"
                )
            return np.divide(radius, focal_px)


def focal_from_fov(proj: LensProjection, half_width_px: float, half_hfov_rad: float) -> float:
    """
    Focal length that maps the half field of view onto the half sensor width.

    A pinhole camera cannot image a half field of view of pi/2 or more: the
    sensor would have to be infinitely wide.
    """
    if not half_width_px > 0:
        raise DomainError(f"half_width_px must be positive, got {half_width_px}")
    if not half_hfov_rad > 0:
        raise DomainError(f"half_hfov_rad must be positive, got {half_hfov_rad}")

    match proj:
        case LensProjection.PINHOLE:
            if not half_hfov_rad < PINHOLE_LIMIT:
                raise DomainError(
                    "Pinhole half field of view must be below pi/2 "
                    f"(got {math.degrees(half_hfov_rad):.6g} deg); it would need an infinite sensor"
                )
            return half_width_px / math.tan(half_hfov_rad)
        case LensProjection.EQUIDISTANT_FISHEYE:
            if half_hfov_rad > math.pi / 2:
                raise DomainError(
                    f"Equidistant half field of view must be at most pi/2 (got {half_hfov_rad:.12g} rad)"
                )
            return half_width_px / half_hfov_rad


def ifov(proj: LensProjection, focal_px: float, theta):
    """
    Instantaneous field of view: the angle (radians) spanned by one pixel at
    ``theta``. Constant for the equidistant law, shrinking as cos^2 for pinhole.
    """
    _check_focal(focal_px)
    _check_angles(proj, theta)

    match proj:
        case LensProjection.PINHOLE:
            return np.cos(theta) ** 2 / focal_px
        case LensProjection.EQUIDISTANT_FISHEYE:
            return np.full_like(np.asarray(theta, dtype=float), 1.0 / focal_px) if np.ndim(theta) else 1.0 / focal_px


@dataclass(frozen=True)
class CameraIntrinsics:
    focal_px: float
    sensor_width_px: int
    hfov_rad: float
    pixel_pitch_um: float = 2.1

    def __post_init__(self):
        errors = []
        if not self.focal_px > 0:
            errors.append(f"focal_px must be positive, got {self.focal_px}")
        if isinstance(self.sensor_width_px, bool) or not isinstance(self.sensor_width_px, (int, np.integer)):
            errors.append(f"sensor_width_px must be an integer, got {self.sensor_width_px!r}")
        elif self.sensor_width_px < 2:
            errors.append(f"sensor_width_px must be at least 2, got {self.sensor_width_px}")
        if not 0 < self.hfov_rad <= math.pi:
            errors.append(f"hfov_rad must be in (0, pi], got {self.hfov_rad}")
        if not self.pixel_pitch_um > 0:
            errors.append(f"pixel_pitch_um must be positive, got {self.pixel_pitch_um}")
        if errors:
            raise DomainError("; ".join(errors))

    @classmethod
    def from_fov(
        cls,
        proj: LensProjection,
        sensor_width_px: int,
        hfov_rad: float,
        pixel_pitch_um: float = 2.1,
    ) -> "CameraIntrinsics":
        focal = focal_from_fov(proj, sensor_width_px / 2, hfov_rad / 2)
        return cls(focal, sensor_width_px, hfov_rad, pixel_pitch_um)

    @classmethod
    def from_focal(
        cls,
        proj: LensProjection,
        focal_px: float,
        sensor_width_px: int,
        pixel_pitch_um: float = 2.1,
    ) -> "CameraIntrinsics":
        """Intrinsics whose field of view is whatever ``focal_px`` images across the sensor."""
        half_width = sensor_width_px / 2
        if proj is LensProjection.EQUIDISTANT_FISHEYE:
            half_width = min(half_width, focal_px * math.pi / 2)
        half_fov = float(unproject(proj, focal_px, half_width))
        return cls(focal_px, sensor_width_px, 2 * half_fov, pixel_pitch_um)

    @property
    def half_hfov_rad(self) -> float:
        return self.hfov_rad / 2

    def check_projection(self, proj: LensProjection) -> None:
        if proj is LensProjection.PINHOLE and not self.half_hfov_rad < PINHOLE_LIMIT:
            raise DomainError("Pinhole intrinsics require hfov below 180 deg")
