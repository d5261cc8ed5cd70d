"""Scenario configuration (YAML or JSON), strict schema, version 1.

Unknown keys anywhere are rejected. Angles are radians, lengths are in the
same unit as feature coordinates.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from featsel.selection import RNG_NAME

Vec3 = tuple[float, float, float]
Mat3 = tuple[Vec3, Vec3, Vec3]

# camera z (optical axis) -> body x (forward), camera x -> body -y, camera y -> body -z
FORWARD_CAMERA: Mat3 = ((0.0, 0.0, 1.0), (-1.0, 0.0, 0.0), (0.0, -1.0, 0.0))
U64_MAX = 2**64 - 1


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class TrajectoryConfig(_Strict):
    kind: Literal["line", "arc", "waypoints"]
    start: Vec3 = (0.0, 0.0, 0.0)
    heading: float = 0.0
    step: float = 1.0
    turn_rate: float = 0.0
    waypoints: Optional[list[Vec3]] = None

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "waypoints" and not self.waypoints:
            raise ValueError("waypoint trajectory needs a non-empty 'waypoints' list")
        if self.kind != "waypoints" and self.waypoints is not None:
            raise ValueError("'waypoints' is only valid for kind 'waypoints'")
        return self


class MotionConfig(_Strict):
    A: Mat3 = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
    process_noise: Union[float, Mat3] = 0.01
    initial_covariance: Union[float, Mat3] = 0.01


class RigConfig(_Strict):
    fov_half_angle: float = Field(0.6, gt=0.0, lt=np.pi / 2)
    max_range: float = Field(30.0, gt=0.0)
    R_c: Mat3 = FORWARD_CAMERA
    x_c: Vec3 = (0.0, 0.0, 0.0)


class FeatureConfig(_Strict):
    count: int = Field(ge=1)
    box_min: Vec3
    box_max: Vec3
    seed: int = Field(0, ge=0, le=U64_MAX)

    @model_validator(mode="after")
    def _box(self):
        if any(hi <= lo for lo, hi in zip(self.box_min, self.box_max)):
            raise ValueError("feature box is degenerate: box_max must exceed box_min on every axis")
        return self


class ScenarioConfig(_Strict):
    version: Literal[1]
    horizon: int = Field(ge=1)
    trajectory: TrajectoryConfig
    motion: MotionConfig = MotionConfig()
    rig: RigConfig = RigConfig()
    features: FeatureConfig
    sigma: float = Field(1.0, gt=0.0)
    q: int = Field(ge=1)
    epsilon: float = Field(0.1, gt=0.0, lt=1.0)
    seeds: list[int] = [0]
    algorithms: list[Literal["greedy", "stochastic", "surrogate", "brute"]] = ["greedy", "stochastic", "surrogate"]

    @field_validator("seeds")
    @classmethod
    def _seeds(cls, v):
        for s in v:
            if not 0 <= s <= U64_MAX:
                raise ValueError(f"seed {s} is not an unsigned 64-bit integer")
        return v

    @model_validator(mode="after")
    def _check(self):
        if self.q > self.features.count:
            raise ValueError(f"budget q={self.q} exceeds feature count n={self.features.count}")
        if self.trajectory.kind == "waypoints" and len(self.trajectory.waypoints) != self.horizon + 1:
            raise ValueError(f"waypoint trajectory needs horizon+1 = {self.horizon + 1} points")
        return self

    def digest(self) -> str:
        """Stable hash of the resolved configuration and the RNG contract."""
        payload = {"config": self.model_dump(mode="json"), "rng": RNG_NAME}
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def as_matrix(v) -> np.ndarray:
    if isinstance(v, (int, float)):
        return float(v) * np.eye(3)
    return np.asarray(v, dtype=float)


def parse_config(data: dict) -> ScenarioConfig:
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return parse_config(data)
