import math
from numbers import Real

from stereobudget.core.errors import DomainError
from stereobudget.core.projection import PINHOLE_LIMIT, LensProjection, focal_from_fov

VALID_SECTIONS = {"version", "description", "rig", "query", "sweep", "validation"}
VALID_PROJECTIONS = {p.value for p in LensProjection}
VALID_SWEEP_VARIABLES = {"bearing_deg", "depth_m", "baseline_m"}
FOCAL_MISMATCH_TOLERANCE_PX = 0.5
MAX_SENSOR_WIDTH_PX = 1_000_000
MAX_SWEEP_STEPS = 1_000_000
MAX_MONTE_CARLO_SAMPLES = 10_000_000


def _is_number(value) -> bool:
    if not isinstance(value, Real) or isinstance(value, bool):
        return False
    try:
        return math.isfinite(value)
    except OverflowError:
        # ints beyond the float range
        return False


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _check_positive(section: dict, key: str, path: str, errors: list, required: bool = True) -> None:
    if key not in section:
        if required:
            errors.append(f"{path}.{key} is required")
        return
    value = section[key]
    if not _is_number(value):
        errors.append(f"{path}.{key} must be a number, got {value!r}")
    elif value <= 0:
        errors.append(f"{path}.{key} must be positive, got {value}")


def validate_rig_config(rig: dict) -> list:
    """Validate the rig: block."""
    errors = []

    if not isinstance(rig, dict):
        return ["'rig' must be a dictionary"]

    try:
        projection = LensProjection.from_name(rig.get("projection"))
    except DomainError:
        projection = None
        errors.append(f"rig.projection must be one of {sorted(VALID_PROJECTIONS)}, got {rig.get('projection')!r}")

    width = rig.get("sensor_width_px")
    if not _is_int(width):
        errors.append(f"rig.sensor_width_px must be an integer, got {width!r}")
    elif not 2 <= width <= MAX_SENSOR_WIDTH_PX:
        errors.append(f"rig.sensor_width_px must be in [2, {MAX_SENSOR_WIDTH_PX}], got {width}")

    hfov = rig.get("hfov_deg")
    if not _is_number(hfov):
        errors.append(f"rig.hfov_deg must be a number, got {hfov!r}")
    elif not 0 < hfov <= 180:
        errors.append(f"rig.hfov_deg must be in (0, 180], got {hfov}")
    elif projection is LensProjection.PINHOLE and not math.radians(hfov) / 2 < PINHOLE_LIMIT:
        # same test focal_from_fov applies
        errors.append("rig.hfov_deg must be below 180 for a pinhole rig (tan diverges at 90 deg)")

    _check_positive(rig, "pixel_pitch_um", "rig", errors, required=False)
    _check_positive(rig, "baseline_m", "rig", errors)
    _check_positive(rig, "focal_px", "rig", errors, required=False)

    if errors or "focal_px" not in rig:
        return errors

    derived = focal_from_fov(projection, width / 2, math.radians(hfov) / 2)
    if abs(derived - rig["focal_px"]) > FOCAL_MISMATCH_TOLERANCE_PX:
        errors.append(
            f"rig.focal_px {rig['focal_px']} disagrees with the {derived:.4f} px implied by "
            f"sensor_width_px and hfov_deg (tolerance {FOCAL_MISMATCH_TOLERANCE_PX} px)"
        )
    return errors


def validate_query_config(query: dict) -> list:
    """Validate the query: block."""
    if not isinstance(query, dict):
        return ["'query' must be a dictionary"]

    errors = []
    _check_positive(query, "depth_m", "query", errors)
    _check_positive(query, "disparity_error_px", "query", errors)
    if "bearing_deg" in query:
        bearing = query["bearing_deg"]
        if not _is_number(bearing):
            errors.append(f"query.bearing_deg must be a number, got {bearing!r}")
        elif not -90 < bearing < 90:
            errors.append(f"query.bearing_deg must be in (-90, 90), got {bearing}")
    return errors


def validate_sweep_config(sweep: dict) -> list:
    """Validate the sweep: block."""
    if not isinstance(sweep, dict):
        return ["'sweep' must be a dictionary"]

    errors = []
    variable = sweep.get("variable")
    if variable not in VALID_SWEEP_VARIABLES:
        errors.append(f"sweep.variable must be one of {sorted(VALID_SWEEP_VARIABLES)}, got {variable!r}")

    steps = sweep.get("steps")
    if not _is_int(steps):
        errors.append(f"sweep.steps must be an integer, got {steps!r}")
    elif steps < 2:
        errors.append(f"sweep.steps must be at least 2, got {steps}")
    elif steps > MAX_SWEEP_STEPS:
        errors.append(f"sweep.steps must be at most {MAX_SWEEP_STEPS}, got {steps}")

    start, stop = sweep.get("start"), sweep.get("stop")
    if not _is_number(start):
        errors.append(f"sweep.start must be a number, got {start!r}")
    if not _is_number(stop):
        errors.append(f"sweep.stop must be a number, got {stop!r}")
    if errors:
        return errors

    if not start < stop:
        errors.append(f"sweep.start ({start}) must be below sweep.stop ({stop})")
    if variable == "bearing_deg":
        if not (-90 < start and stop < 90):
            errors.append(f"bearing sweep must stay inside (-90, 90) deg, got {start}..{stop}")
    elif start <= 0:
        errors.append(f"sweep.start must be positive for {variable}, got {start}")
    return errors


def validate_validation_config(validation: dict) -> list:
    """Validate the validation: block."""
    if not isinstance(validation, dict):
        return ["'validation' must be a dictionary"]

    errors = []
    if "enabled" in validation and not isinstance(validation["enabled"], bool):
        errors.append("validation.enabled must be a boolean")
    _check_positive(validation, "fd_step_rel", "validation", errors, required=False)
    if _is_number(validation.get("fd_step_rel")) and validation["fd_step_rel"] >= 0.5:
        errors.append(f"validation.fd_step_rel must be below 0.5, got {validation['fd_step_rel']}")

    mc = validation.get("monte_carlo")
    if mc is None:
        return errors
    if not isinstance(mc, dict):
        errors.append("validation.monte_carlo must be a dictionary")
        return errors

    _check_positive(mc, "sigma_px", "validation.monte_carlo", errors, required=False)
    samples = mc.get("samples", 100_000)
    if not _is_int(samples) or not 100 <= samples <= MAX_MONTE_CARLO_SAMPLES:
        errors.append(
            f"validation.monte_carlo.samples must be an integer in [100, {MAX_MONTE_CARLO_SAMPLES}], got {samples!r}"
        )
    seed = mc.get("seed", 42)
    if not _is_int(seed) or not 0 <= seed < 2 ** 64:
        errors.append(f"validation.monte_carlo.seed must be a 64-bit unsigned integer, got {seed!r}")
    return errors


def validate_scenario_config(config: dict) -> list:
    errors = []

    if not isinstance(config, dict):
        return ["Config must be a dictionary at the top level"]

    for key in config:
        if key not in VALID_SECTIONS:
            errors.append(f"Unknown config section '{key}'")

    if "version" in config and not _is_int(config["version"]):
        errors.append("version must be an integer")

    # ---- Required sections ----
    for section in ("rig", "query", "sweep"):
        if section not in config:
            errors.append(f"'{section}' section is required")

    if "rig" in config:
        errors.extend(validate_rig_config(config["rig"]))
    if "query" in config:
        errors.extend(validate_query_config(config["query"]))
    if "sweep" in config:
        errors.extend(validate_sweep_config(config["sweep"]))

    # ---- Optional sections ----
    if "validation" in config:
        errors.extend(validate_validation_config(config["validation"]))

    return errors
