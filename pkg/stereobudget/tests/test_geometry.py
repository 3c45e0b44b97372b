"""
Tests for stereobudget.core.geometry
"""
import math

import numpy as np
import pytest

from stereobudget.core.errors import DomainError, NoSolutionError
from stereobudget.core.geometry import (
    ObjectPose,
    StereoRig,
    camera_bearings,
    depth_to_range,
    disparity,
    effective_baseline,
    invert_disparities,
    range_from_disparity,
    range_to_depth,
)
from stereobudget.core.projection import CameraIntrinsics, LensProjection

PINHOLE = LensProjection.PINHOLE
FISHEYE = LensProjection.EQUIDISTANT_FISHEYE


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _rig(projection=FISHEYE, baseline_m=1.0, focal_px=1222.3) -> StereoRig:
    hfov = math.pi if projection is FISHEYE else 2.0
    return StereoRig(baseline_m, CameraIntrinsics(focal_px, 3840, hfov, 2.1), projection)


# ---------------------------------------------------------------------------
# StereoRig / ObjectPose
# ---------------------------------------------------------------------------

def test_rig_rejects_nonpositive_baseline():
    with pytest.raises(DomainError, match="baseline_m"):
        _rig(baseline_m=0.0)


def test_rig_rejects_pinhole_with_180_degree_intrinsics():
    with pytest.raises(DomainError, match="Pinhole"):
        StereoRig(1.0, CameraIntrinsics(1222.3, 3840, math.pi), PINHOLE)


def test_rig_with_projection_keeps_focal_and_baseline():
    fisheye = _rig(FISHEYE, baseline_m=0.7)
    pinhole = fisheye.with_projection(PINHOLE)
    assert pinhole.projection is PINHOLE
    assert pinhole.focal_px == fisheye.focal_px
    assert pinhole.baseline_m == 0.7
    assert fisheye.with_projection(FISHEYE) is fisheye


def test_pose_from_depth_round_trip():
    for depth in (0.5, 10.0, 1234.5):
        for bearing in (-1.4, -0.3, 0.0, 0.52, 1.5):
            pose = ObjectPose.from_depth(depth, bearing)
            assert pose.depth_m == pytest.approx(depth, rel=1e-12)
            assert pose.bearing_rad == bearing


@pytest.mark.parametrize("range_m,bearing", [(0.0, 0.0), (-1.0, 0.0), (10.0, math.pi / 2), (10.0, -2.0)])
def test_pose_invalid(range_m, bearing):
    with pytest.raises(DomainError):
        ObjectPose(range_m, bearing)


def test_pose_from_depth_invalid():
    with pytest.raises(DomainError, match="depth_m"):
        ObjectPose.from_depth(0.0, 0.1)


# ---------------------------------------------------------------------------
# depth / range conversion
# ---------------------------------------------------------------------------

def test_depth_to_range_examples():
    assert depth_to_range(10.0, 0.0) == 10.0
    assert depth_to_range(10.0, math.radians(60)) == pytest.approx(20.0, rel=1e-12)
    assert range_to_depth(10.0, math.radians(30)) == pytest.approx(8.6603, abs=1e-4)


def test_depth_range_round_trip():
    for bearing in np.linspace(-1.5, 1.5, 31):
        assert range_to_depth(depth_to_range(7.3, bearing), bearing) == pytest.approx(7.3, rel=1e-12)


# ---------------------------------------------------------------------------
# effective_baseline
# ---------------------------------------------------------------------------

def test_effective_baseline_examples():
    assert effective_baseline(1.0, 0.0) == 1.0
    assert effective_baseline(1.0, math.radians(60)) == pytest.approx(0.5, rel=1e-12)
    assert effective_baseline(2.5, math.radians(30)) == pytest.approx(2.1651, abs=1e-4)


def test_effective_baseline_never_exceeds_baseline():
    for bearing in np.linspace(-1.5, 1.5, 61):
        value = effective_baseline(1.3, bearing)
        assert 0 < value <= 1.3
        if bearing != 0:
            assert value < 1.3


# ---------------------------------------------------------------------------
# camera_bearings
# ---------------------------------------------------------------------------

def test_camera_bearings_centerline():
    left, right = camera_bearings(_rig(), ObjectPose(10.0, 0.0))
    assert left == pytest.approx(math.atan(0.05), rel=1e-14)
    assert right == pytest.approx(-math.atan(0.05), rel=1e-14)
    assert left == pytest.approx(0.0499584, abs=1e-7)


def test_camera_bearings_wide_baseline():
    left, right = camera_bearings(_rig(baseline_m=2.0), ObjectPose.from_depth(1.0, 0.0))
    assert left == pytest.approx(math.pi / 4, rel=1e-14)
    assert right == pytest.approx(-math.pi / 4, rel=1e-14)


def test_camera_bearings_left_exceeds_right_off_axis():
    rig = _rig()
    for bearing in np.linspace(-1.4, 1.4, 29):
        left, right = camera_bearings(rig, ObjectPose.from_depth(3.0, bearing))
        assert left > right


# ---------------------------------------------------------------------------
# disparity
# ---------------------------------------------------------------------------

def test_disparity_pinhole_on_axis():
    assert disparity(_rig(PINHOLE), ObjectPose.from_depth(10.0, 0.0)) == pytest.approx(122.23, rel=1e-12)


def test_disparity_fisheye_on_axis():
    expected = 2 * 1222.3 * math.atan(0.05)
    value = disparity(_rig(FISHEYE), ObjectPose.from_depth(10.0, 0.0))
    assert value == pytest.approx(expected, rel=1e-12)
    assert value == pytest.approx(122.128, abs=1e-3)


def test_disparity_pinhole_is_bearing_invariant():
    rig = _rig(PINHOLE)
    for degrees in range(-80, 81, 5):
        value = disparity(rig, ObjectPose.from_depth(10.0, math.radians(degrees)))
        assert value == pytest.approx(122.23, rel=1e-12)


@pytest.mark.parametrize("projection", [PINHOLE, FISHEYE])
def test_disparity_decreases_with_range(projection):
    rig = _rig(projection)
    for bearing in (0.0, 0.5, 1.2):
        values = [disparity(rig, ObjectPose(r, bearing)) for r in np.geomspace(1.0, 1e5, 60)]
        assert all(a > b > 0 for a, b in zip(values, values[1:]))


def test_disparity_pinhole_outside_field_of_view_raises():
    rig = _rig(PINHOLE)
    # the left camera ray lands inside the guard band around the pole
    pose = ObjectPose(1.0, math.pi / 2 - 1e-12)
    with pytest.raises(DomainError, match="field of view"):
        disparity(rig, pose)


# ---------------------------------------------------------------------------
# range_from_disparity
# ---------------------------------------------------------------------------

def test_range_from_disparity_pinhole():
    assert range_from_disparity(_rig(PINHOLE), 0.0, 122.23) == pytest.approx(10.0, abs=1e-6)


def test_range_from_disparity_fisheye():
    assert range_from_disparity(_rig(FISHEYE), 0.0, 122.128) == pytest.approx(10.0, abs=1e-3)


@pytest.mark.parametrize("projection", [PINHOLE, FISHEYE])
def test_range_from_disparity_zero_disparity_has_no_solution(projection):
    with pytest.raises(NoSolutionError) as excinfo:
        range_from_disparity(_rig(projection), 0.0, 0.0)
    low, high = excinfo.value.achievable
    assert 0 < low < high


def test_range_from_disparity_too_large_reports_interval():
    rig = _rig(PINHOLE)
    with pytest.raises(NoSolutionError, match="achievable"):
        range_from_disparity(rig, 0.0, 5000.0)


@pytest.mark.parametrize("projection", [PINHOLE, FISHEYE])
def test_range_from_disparity_round_trip(projection):
    rig = _rig(projection)
    for ratio in (2.0, 10.0, 137.0, 1e4):
        for degrees in (-80, -30, 0, 45, 80):
            pose = ObjectPose(ratio * rig.baseline_m, math.radians(degrees))
            d = disparity(rig, pose)
            recovered = range_from_disparity(rig, pose.bearing_rad, d)
            assert recovered == pytest.approx(pose.range_m, rel=1e-6)
            assert disparity(rig, ObjectPose(recovered, pose.bearing_rad)) == pytest.approx(d, abs=1e-10)


def test_invert_disparities_marks_unreachable_as_nan():
    rig = _rig(FISHEYE)
    result = invert_disparities(rig, 0.0, [0.0, 122.128, 1e6])
    assert math.isnan(result[0])
    assert result[1] == pytest.approx(10.0, abs=1e-3)
    assert math.isnan(result[2])


def test_invert_disparities_does_not_depend_on_batching():
    rig = _rig(FISHEYE)
    targets = np.linspace(1.0, 300.0, 40)
    batched = invert_disparities(rig, 0.4, targets)
    single = np.array([invert_disparities(rig, 0.4, t)[0] for t in targets])
    assert np.array_equal(batched, single)
