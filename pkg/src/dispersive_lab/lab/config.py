"""Experiment configuration: schema, scenario presets and loading.

A configuration file is YAML (or JSON, which YAML also reads).  The only
required key is ``scenario``; everything else falls back to the scenario
preset and then to the schema defaults.  Command-line overrides are applied
last.
"""

from __future__ import annotations

import copy
import json
import math
from pathlib import Path
from typing import Any, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import ConfigurationError

PI = math.pi

SCENARIOS = (
    "linear_decay_kdv",
    "nonlinear_decay_gkdv",
    "linear_decay_zk2d",
    "nonlinear_decay_zk2d",
    "linear_decay_zk3d",
    "nonlinear_decay_zk3d",
    "anisotropic_zk4d",
    "kato_identity",
    "strichartz_scan",
    "commutator_corpus",
    "lorentz_unit",
)

Exponent = Union[float, Literal["inf"]]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True, ser_json_inf_nan="strings")


class DataConfig(_Strict):
    """Initial-data family and its size.

    ``epsilon`` is the value of the ``calibrate`` norm of ``u0``; with
    ``calibrate: none`` the unit-peak profile is multiplied by ``epsilon``.
    """

    kind: Literal["gaussian", "flat_spectrum", "wave_packet", "random_sobolev"] = "gaussian"
    epsilon: float = 0.1
    calibrate: Literal["Hhalf", "H1", "L2", "L1", "Linf", "none"] = "Hhalf"
    width: float = Field(1.0, gt=0)
    radius: float = Field(1.5, gt=0)
    order: int = Field(8, ge=2)
    frequency: float = 3.0
    sigma: float = Field(2.0, gt=0)
    center: float = Field(0.4, gt=-0.5, lt=0.5)

    @field_validator("epsilon")
    @classmethod
    def _positive_amplitude(cls, v: float) -> float:
        if not (math.isfinite(v) and v > 0):
            raise ValueError("degenerate initial data: epsilon must be > 0")
        return v


class ScheduleConfig(_Strict):
    kind: Literal["geometric", "hybrid", "uniform"] = "geometric"
    ratio: float = Field(1.1, gt=1)
    start: float = Field(1.0, gt=0)
    spacing: float = Field(0.01, gt=0)
    switch: float = Field(2.0, ge=0)


class CorpusConfig(_Strict):
    seed: int = 1
    size: int = Field(200, ge=1)
    calibration_seed: int = 0
    calibration_size: int = Field(2000, ge=1)
    cap_tolerance: float = Field(0.05, ge=0)
    n: int = 1024
    L: float = Field(32 * PI, gt=0)


class ExperimentConfig(_Strict):
    scenario: str
    family: Optional[Literal["airy", "zk"]] = None
    d: Optional[int] = Field(None, ge=1, le=4)
    k: int = Field(4, ge=1, description="nonlinearity power; must be >= 1")
    sign: Literal["focusing", "defocusing"] = "defocusing"
    n: Union[int, list[int]] = 8192
    L: Union[float, list[float]] = 400 * PI
    data: DataConfig = DataConfig()
    T: float = Field(50.0, gt=0)
    dt: Optional[float] = Field(None, gt=0)
    cfl: float = Field(0.5, gt=0)
    max_halvings: int = Field(4, ge=0)
    schedule: ScheduleConfig = ScheduleConfig()
    r_values: list[Exponent] = []
    window: list[Optional[float]] = [5.0, 50.0]
    tolerances: dict[str, float] = {}
    mass_drift_max: float = Field(1e-10, gt=0)
    energy_drift_max: float = Field(1e-8, gt=0)
    wrap_threshold: float = Field(1e-6, gt=0)
    buffer_fraction: float = Field(0.05, gt=0, lt=0.5)
    halt_on_wrap: bool = True
    max_stored: Optional[int] = Field(64, ge=0)
    epsilon_sweep: list[float] = []
    x_star: list[float] = [0.0, 5.0]
    thetas: list[float] = [0.0, 0.25, 0.5, 0.75, 1.0]
    alphas: list[float] = [0.0, 0.125, 0.25, 0.375, 0.5]
    scaling_lambda: float = Field(2.0, gt=0)
    corpus: CorpusConfig = CorpusConfig()
    seed: int = 0
    long_running: bool = False
    outdir: Optional[str] = None

    @field_validator("scenario")
    @classmethod
    def _known_scenario(cls, v: str) -> str:
        if v not in SCENARIOS:
            raise ValueError(f"unknown scenario {v!r}; expected one of {', '.join(SCENARIOS)}")
        return v

    @field_validator("r_values")
    @classmethod
    def _admissible_r(cls, v: list[Exponent]) -> list[Exponent]:
        for r in v:
            if r != "inf" and float(r) < 2:
                raise ValueError(f"decay exponents need r >= 2, got {r!r}")
        return v

    @field_validator("window")
    @classmethod
    def _window_pair(cls, v: list[Optional[float]]) -> list[Optional[float]]:
        if len(v) != 2 or v[0] is None or v[0] < 0:
            raise ValueError("window must be [t0, t1] with t0 >= 0 (t1 may be null for 'until wrap')")
        if v[1] is not None and v[1] <= v[0]:
            raise ValueError("window end must exceed its start")
        return v

    @field_validator("epsilon_sweep")
    @classmethod
    def _positive_sweep(cls, v: list[float]) -> list[float]:
        if any(not (e > 0) for e in v):
            raise ValueError("degenerate initial data: every sweep amplitude must be > 0")
        return v

    @model_validator(mode="after")
    def _consistent(self) -> "ExperimentConfig":
        for a in self.thetas:
            if not 0 <= a <= 1:
                raise ValueError(f"theta values must lie in [0, 1], got {a!r}")
        for a in self.alphas:
            if not 0 <= a <= 0.5:
                raise ValueError(f"alpha values must lie in [0, 1/2], got {a!r}")
        return self

    # convenience --------------------------------------------------------
    def exponents(self) -> list[float]:
        return [math.inf if r == "inf" else float(r) for r in self.r_values]

    def output_dir(self) -> Path:
        return Path(self.outdir) if self.outdir else Path("runs") / self.scenario

    def grid_args(self) -> tuple[int, list[int], list[float]]:
        d = int(self.d or 1)
        n = [self.n] * d if isinstance(self.n, int) else list(self.n)
        L = [self.L] * d if isinstance(self.L, (int, float)) else list(self.L)
        return d, n, L


# ---------------------------------------------------------------------------
# Scenario presets
# ---------------------------------------------------------------------------

_LINEAR_1D: dict[str, Any] = {
    "family": "airy", "d": 1, "n": 8192, "L": 400 * PI,
    "data": {"kind": "gaussian", "width": 1.0, "center": 0.4, "calibrate": "Linf", "epsilon": 1.0},
    "T": 50.0, "r_values": [4, 8], "window": [5.0, 50.0], "halt_on_wrap": False,
    "tolerances": {"Linf": 0.03, "L4": 0.03, "L8": 0.03},
}

PRESETS: dict[str, dict[str, Any]] = {
    "linear_decay_kdv": _LINEAR_1D,
    "nonlinear_decay_gkdv": {
        "family": "airy", "d": 1, "k": 4, "sign": "defocusing", "n": 8192, "L": 400 * PI,
        "data": {"kind": "gaussian", "width": 1.0, "center": 0.4, "calibrate": "Hhalf", "epsilon": 0.1},
        "T": 50.0, "window": [5.0, None], "halt_on_wrap": True,
        "tolerances": {"Linf": 0.05},
    },
    "linear_decay_zk2d": {
        "family": "zk", "d": 2, "n": 1024, "L": 128 * PI,
        "data": {"kind": "flat_spectrum", "radius": 1.5, "order": 8, "center": 0.4, "calibrate": "Linf", "epsilon": 1.0},
        "T": 40.0, "r_values": [8], "window": [2.0, None], "halt_on_wrap": True, "max_stored": 0,
        "tolerances": {"Linf": 0.05, "L8": 0.05},
    },
    "nonlinear_decay_zk2d": {
        "family": "zk", "d": 2, "k": 3, "sign": "focusing", "n": 1024, "L": 128 * PI,
        "data": {"kind": "flat_spectrum", "radius": 1.5, "order": 8, "center": 0.4, "calibrate": "H1", "epsilon": 0.1},
        "T": 40.0, "window": [2.0, None], "halt_on_wrap": True, "max_stored": 0,
        "tolerances": {"Linf": 0.08},
    },
    "linear_decay_zk3d": {
        "family": "zk", "d": 3, "n": 256, "L": 128.0,
        "data": {"kind": "flat_spectrum", "radius": 2.5, "order": 8, "center": 0.3, "calibrate": "Linf", "epsilon": 1.0},
        "T": 12.0, "window": [2.0, 12.0], "halt_on_wrap": False, "max_stored": 0,
        "tolerances": {"Linf": 0.1},
    },
    "nonlinear_decay_zk3d": {
        "family": "zk", "d": 3, "k": 4, "sign": "focusing", "n": 128, "L": 128.0,
        "data": {"kind": "flat_spectrum", "radius": 2.5, "order": 8, "center": 0.3, "calibrate": "H1", "epsilon": 0.05},
        "T": 12.0, "window": [2.0, 12.0], "halt_on_wrap": False, "max_stored": 0,
        "tolerances": {"Linf": 0.1},
    },
    "anisotropic_zk4d": {
        "family": "zk", "d": 4, "n": 32, "L": 32.0,
        "data": {"kind": "flat_spectrum", "radius": 1.5, "order": 8, "center": 0.3, "calibrate": "Linf", "epsilon": 1.0},
        "T": 12.0, "window": [2.0, 12.0], "halt_on_wrap": False, "max_stored": 0,
        "tolerances": {"dxu_L6yL2x": 0.15, "Linf": 0.15},
    },
    "kato_identity": {
        "family": "airy", "d": 1, "n": 4096, "L": 400 * PI,
        "data": {"kind": "wave_packet", "width": 2.0, "frequency": 3.0, "center": 0.0, "calibrate": "L2", "epsilon": 1.0},
        "x_star": [0.0, 5.0], "tolerances": {"ratio": 0.01, "x_star_spread": 1e-3},
    },
    "strichartz_scan": {
        "family": "airy", "d": 1, "n": 8192, "L": 400 * PI,
        "data": {"kind": "gaussian", "width": 1.0, "center": 0.0, "calibrate": "L2", "epsilon": 1.0},
        "T": 20.0, "schedule": {"kind": "hybrid", "switch": 2.0, "spacing": 0.01, "ratio": 1.02},
        "halt_on_wrap": False, "max_stored": None, "scaling_lambda": 2.0,
        "corpus": {"size": 50, "seed": 1},
        "tolerances": {"scaling": 0.02},
    },
    "commutator_corpus": {
        "corpus": {"size": 200, "seed": 1, "calibration_size": 2000, "calibration_seed": 0,
                   "cap_tolerance": 0.05, "n": 1024, "L": 32 * PI},
    },
    "lorentz_unit": {
        "n": 1024, "L": 32 * PI, "d": 1,
        "corpus": {"size": 200, "seed": 1, "calibration_size": 2000, "calibration_seed": 0, "cap_tolerance": 0.05},
        "tolerances": {"closed_form": 1e-9},
    },
}


def deep_merge(base: dict[str, Any], extra: dict[str, Any]) -> dict[str, Any]:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _format_validation(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        loc = ".".join(str(x) for x in e["loc"]) or "<root>"
        if e["type"] == "extra_forbidden":
            parts.append(f"unknown key {loc!r}")
        else:
            parts.append(f"{loc}: {e['msg']}")
    return "; ".join(parts)


def build_config(raw: dict[str, Any], overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """Merge preset, file contents and overrides, then validate."""
    if not isinstance(raw, dict):
        raise ConfigurationError("configuration must be a mapping of keys to values")
    merged = deep_merge(raw, overrides or {})
    scenario = merged.get("scenario")
    if scenario is None:
        raise ConfigurationError("missing required key 'scenario'")
    preset = PRESETS.get(scenario, {}) if isinstance(scenario, str) else {}
    merged = deep_merge(preset, merged)
    try:
        return ExperimentConfig.model_validate(merged)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid configuration: {_format_validation(exc)}") from None


def parse_text(text: str, source: str = "<string>") -> dict[str, Any]:
    """Parse YAML or JSON text, reporting the line of a syntax error."""
    if source.endswith(".json"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{source}:{exc.lineno}: {exc.msg}") from None
    else:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            line = f"{mark.line + 1}" if mark is not None else "?"
            problem = getattr(exc, "problem", None) or str(exc)
            raise ConfigurationError(f"{source}:{line}: {problem}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{source}: top level must be a mapping")
    return data


def load_config(path: str | Path, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """Read, merge with the scenario preset and validate a configuration file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read configuration {p}: {exc.strerror}") from None
    return build_config(parse_text(text, str(p)), overrides)


def dotted_override(assignment: str) -> dict[str, Any]:
    """Turn ``a.b=value`` into ``{'a': {'b': value}}`` (value parsed as YAML)."""
    if "=" not in assignment:
        raise ConfigurationError(f"override {assignment!r} must look like key=value")
    key, text = assignment.split("=", 1)
    try:
        value = yaml.safe_load(text)
    except yaml.YAMLError:
        value = text
    out: dict[str, Any] = {}
    node = out
    parts = key.strip().split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    node[parts[-1]] = value
    return out


__all__ = [
    "SCENARIOS",
    "PRESETS",
    "DataConfig",
    "ScheduleConfig",
    "CorpusConfig",
    "ExperimentConfig",
    "build_config",
    "parse_text",
    "load_config",
    "dotted_override",
    "deep_merge",
]
