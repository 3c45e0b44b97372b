import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import yaml

from stereobudget.core.config_validator import validate_scenario_config
from stereobudget.core.errors import ConfigError
from stereobudget.core.geometry import StereoRig
from stereobudget.core.projection import CameraIntrinsics, LensProjection

DEFAULT_FD_STEP_REL = 1e-4
BUNDLED_SCENARIO = "fisheye_4k.json"


@dataclass(frozen=True)
class RigConfig:
    projection: LensProjection
    sensor_width_px: int
    hfov_deg: float
    baseline_m: float
    pixel_pitch_um: float = 2.1
    focal_px: Optional[float] = None

    def build(self) -> StereoRig:
        hfov_rad = math.radians(self.hfov_deg)
        if self.focal_px is None:
            intrinsics = CameraIntrinsics.from_fov(
                self.projection, self.sensor_width_px, hfov_rad, self.pixel_pitch_um
            )
        else:
            intrinsics = CameraIntrinsics(self.focal_px, self.sensor_width_px, hfov_rad, self.pixel_pitch_um)
        return StereoRig(self.baseline_m, intrinsics, self.projection)


@dataclass(frozen=True)
class QueryConfig:
    depth_m: float
    disparity_error_px: float
    bearing_deg: float = 0.0


@dataclass(frozen=True)
class SweepConfig:
    variable: str
    start: float
    stop: float
    steps: int


@dataclass(frozen=True)
class MonteCarloConfig:
    sigma_px: Optional[float] = None
    samples: int = 100_000
    seed: int = 42


@dataclass(frozen=True)
class ValidationConfig:
    enabled: bool = False
    fd_step_rel: float = DEFAULT_FD_STEP_REL
    monte_carlo: Optional[MonteCarloConfig] = None


@dataclass(frozen=True)
class ScenarioConfig:
    rig: RigConfig
    query: QueryConfig
    sweep: SweepConfig
    validation: ValidationConfig = field(default_factory=ValidationConfig)
    description: str = ""

    def stereo_rig(self) -> StereoRig:
        return self.rig.build()

    def as_dict(self) -> dict:
        """Plain-dict echo of the config, degrees and all, as a user would write it."""
        rig = {
            "projection": self.rig.projection.value,
            "sensor_width_px": self.rig.sensor_width_px,
            "hfov_deg": self.rig.hfov_deg,
            "pixel_pitch_um": self.rig.pixel_pitch_um,
            "baseline_m": self.rig.baseline_m,
            "focal_px": self.stereo_rig().focal_px,
        }
        validation = {"enabled": self.validation.enabled, "fd_step_rel": self.validation.fd_step_rel}
        if self.validation.monte_carlo is not None:
            mc = self.validation.monte_carlo
            validation["monte_carlo"] = {"sigma_px": mc.sigma_px, "samples": mc.samples, "seed": mc.seed}
        return {
            "rig": rig,
            "query": {
                "depth_m": self.query.depth_m,
                "disparity_error_px": self.query.disparity_error_px,
                "bearing_deg": self.query.bearing_deg,
            },
            "sweep": {
                "variable": self.sweep.variable,
                "start": self.sweep.start,
                "stop": self.sweep.stop,
                "steps": self.sweep.steps,
            },
            "validation": validation,
        }


def build_scenario_config(raw: dict, source: Optional[str] = None) -> ScenarioConfig:
    """Validate a raw config mapping and apply defaults."""
    errors = validate_scenario_config(raw)
    if errors:
        raise ConfigError(errors, source)

    rig = raw["rig"]
    query = raw["query"]
    sweep = raw["sweep"]
    validation = raw.get("validation", {})

    mc = validation.get("monte_carlo")
    mc_config = None
    if mc is not None:
        mc_config = MonteCarloConfig(
            sigma_px=mc.get("sigma_px"),
            samples=mc.get("samples", 100_000),
            seed=mc.get("seed", 42),
        )

    return ScenarioConfig(
        rig=RigConfig(
            projection=LensProjection.from_name(rig["projection"]),
            sensor_width_px=rig["sensor_width_px"],
            hfov_deg=float(rig["hfov_deg"]),
            baseline_m=float(rig["baseline_m"]),
            pixel_pitch_um=float(rig.get("pixel_pitch_um", 2.1)),
            focal_px=float(rig["focal_px"]) if "focal_px" in rig else None,
        ),
        query=QueryConfig(
            depth_m=float(query["depth_m"]),
            disparity_error_px=float(query["disparity_error_px"]),
            bearing_deg=float(query.get("bearing_deg", 0.0)),
        ),
        sweep=SweepConfig(
            variable=sweep["variable"],
            start=float(sweep["start"]),
            stop=float(sweep["stop"]),
            steps=sweep["steps"],
        ),
        validation=ValidationConfig(
            enabled=validation.get("enabled", False),
            fd_step_rel=float(validation.get("fd_step_rel", DEFAULT_FD_STEP_REL)),
            monte_carlo=mc_config,
        ),
        description=str(raw.get("description", "")).strip(),
    )


def parse_config(text: str, fmt: str = "json", source: Optional[str] = None) -> ScenarioConfig:
    """Parse config text (``fmt`` is "json" or "yaml")."""
    source = source or "<string>"
    try:
        if fmt == "json":
            raw = json.loads(text)
        elif fmt == "yaml":
            raw = yaml.safe_load(text)
        else:
            raise ConfigError([f"Unsupported config format '{fmt}'"], source)
    except json.JSONDecodeError as e:
        raise ConfigError([f"line {e.lineno}, column {e.colno}: {e.msg}"], source) from e
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        problem = getattr(e, "problem", None) or str(e)
        raise ConfigError([f"{where}{problem}"], source) from e

    if raw is None:
        raise ConfigError(["Config is empty"], source)
    return build_scenario_config(raw, source)


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    path = Path(path)
    if path.suffix in (".yml", ".yaml"):
        fmt = "yaml"
    elif path.suffix == ".json":
        fmt = "json"
    else:
        raise ConfigError(["Config must be .json, .yml or .yaml"], str(path))

    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ConfigError([f"File is not valid UTF-8: {path}"], str(path)) from e
    return parse_config(text, fmt, str(path))


def bundled_scenario_text() -> str:
    """The shipped 4K fisheye scenario, as JSON text."""
    return (Path(__file__).resolve().parent.parent / "scenarios" / BUNDLED_SCENARIO).read_text(encoding="utf-8")


def bundled_scenario() -> ScenarioConfig:
    return parse_config(bundled_scenario_text(), "json", BUNDLED_SCENARIO)
