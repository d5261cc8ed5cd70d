from __future__ import annotations

import hashlib
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from featsel.bench.config import ScenarioConfig, as_matrix
from featsel.motion import HorizonPrior, MotionModel, propagate_prior
from featsel.selection import Objective
from featsel.vision import (
    CameraRig,
    DegenerateGeometryError,
    FeatureInfo,
    FeatureTrack,
    PoseSequence,
    TriangulationError,
    make_track,
    track_information,
)

log = logging.getLogger(__name__)


class ScenarioInfeasible(RuntimeError):
    def __init__(self, triangulable: int, q: int, total: int):
        self.triangulable = triangulable
        self.q = q
        self.total = total
        super().__init__(f"only {triangulable} of {total} features are triangulable, budget q={q}")


@dataclass
class Scenario:
    config: ScenarioConfig
    prior: HorizonPrior
    poses: PoseSequence
    rig: CameraRig
    tracks: dict[int, FeatureTrack]
    candidates: dict[int, FeatureInfo]
    rejected: dict[int, str]
    digest: str
    candidate_digest: str
    build_time: float = field(default=0.0, compare=False)

    def objective(self) -> Objective:
        return Objective(self.prior.Hbar, self.candidates, sigma=self.config.sigma)

    def summary(self) -> dict:
        return {
            "digest": self.digest,
            "candidate_digest": self.candidate_digest,
            "config": self.config.model_dump(mode="json"),
            "horizon_dim": self.prior.dim,
            "candidates": [
                {"id": c.id, "n_f": c.n_f, "trace": c.trace, "frames": list(self.tracks[c.id].frames)}
                for c in self.candidates.values()
            ],
            "rejected": [{"id": fid, "reason": why} for fid, why in self.rejected.items()],
        }


def _yaw(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def build_poses(cfg: ScenarioConfig) -> PoseSequence:
    """Planar body poses along the configured trajectory; body x points along the heading."""
    tr = cfg.trajectory
    M = cfg.horizon
    start = np.asarray(tr.start, dtype=float)
    if tr.kind == "waypoints":
        P = np.asarray(tr.waypoints, dtype=float)
        yaws = []
        for k in range(M + 1):
            d = P[k + 1] - P[k] if k < M else P[k] - P[k - 1]
            yaws.append(np.arctan2(d[1], d[0]) if np.hypot(d[0], d[1]) > 0 else (yaws[-1] if yaws else tr.heading))
    else:
        rate = tr.turn_rate if tr.kind == "arc" else 0.0
        yaws = [tr.heading + k * rate for k in range(M + 1)]
        P = [start]
        for k in range(1, M + 1):
            mid = tr.heading + (k - 0.5) * rate
            P.append(P[-1] + tr.step * np.array([np.cos(mid), np.sin(mid), 0.0]))
        P = np.asarray(P)
    return PoseSequence(P, np.array([_yaw(y) for y in yaws]))


def build_prior(cfg: ScenarioConfig, poses: PoseSequence) -> HorizonPrior:
    """Prior whose mean tracks the trajectory: ``B = I`` and ``u_k = p_k - A p_{k-1}``."""
    A = np.asarray(cfg.motion.A, dtype=float)
    model = MotionModel(A=A, B=np.eye(3), Lambda=as_matrix(cfg.motion.process_noise))
    P = poses.positions
    controls = [P[k] - A @ P[k - 1] for k in range(1, len(P))]
    return propagate_prior(model, P[0], as_matrix(cfg.motion.initial_covariance), controls, cfg.horizon)


def _candidate_digest(candidates: dict[int, FeatureInfo]) -> str:
    h = hashlib.sha256()
    for fid, c in candidates.items():
        h.update(np.int64(fid).tobytes())
        h.update(np.int64(c.n_f).tobytes())
        h.update(np.ascontiguousarray(c.H).tobytes())
    return h.hexdigest()


def generate_scenario(cfg: ScenarioConfig, seed: int | None = None, check_feasible: bool = True) -> Scenario:
    """Realize the configured scenario. ``seed`` overrides the feature placement seed."""
    t0 = time.perf_counter()
    if seed is not None:
        cfg = cfg.model_copy(update={"features": cfg.features.model_copy(update={"seed": seed})})
    rig = CameraRig(
        R_c=np.asarray(cfg.rig.R_c, dtype=float),
        x_c=np.asarray(cfg.rig.x_c, dtype=float),
        fov_half_angle=cfg.rig.fov_half_angle,
        max_range=cfg.rig.max_range,
    )
    poses = build_poses(cfg)
    prior = build_prior(cfg, poses)

    rng = np.random.Generator(np.random.PCG64(cfg.features.seed))
    lo = np.asarray(cfg.features.box_min)
    hi = np.asarray(cfg.features.box_max)
    points = rng.uniform(lo, hi, size=(cfg.features.count, 3))

    tracks: dict[int, FeatureTrack] = {}
    candidates: dict[int, FeatureInfo] = {}
    rejected: dict[int, str] = {}
    for fid, y in enumerate(points):
        try:
            track = make_track(fid, y, poses, rig)
        except DegenerateGeometryError as exc:
            rejected[fid] = f"degenerate geometry: {exc}"
            continue
        tracks[fid] = track
        if track.n_f == 0:
            rejected[fid] = "not visible in any frame"
            continue
        try:
            candidates[fid] = track_information(track, cfg.sigma)
        except TriangulationError as exc:
            rejected[fid] = f"not triangulable: {exc}"
    if rejected:
        log.info("rejected %d of %d features", len(rejected), cfg.features.count)

    scenario = Scenario(
        config=cfg,
        prior=prior,
        poses=poses,
        rig=rig,
        tracks=tracks,
        candidates=candidates,
        rejected=rejected,
        digest=cfg.digest(),
        candidate_digest=_candidate_digest(candidates),
        build_time=time.perf_counter() - t0,
    )
    if check_feasible and len(candidates) < cfg.q:
        raise ScenarioInfeasible(len(candidates), cfg.q, cfg.features.count)
    return scenario
