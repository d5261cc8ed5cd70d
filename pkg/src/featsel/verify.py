"""Randomized instance generators and the property suites behind ``featsel verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from featsel.motion import MotionModel, propagate_prior
from featsel.selection import Objective, brute_force, greedy, stochastic_greedy
from featsel.vision import (
    CameraRig,
    PoseSequence,
    TriangulationError,
    feature_information,
    make_track,
)


def random_rotation(rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    return Rotation.random(n, random_state=rng).as_matrix()


def random_poses(rng: np.random.Generator, M: int, spread: float = 3.0) -> PoseSequence:
    steps = rng.normal(scale=spread / 3, size=(M + 1, 3))
    positions = np.cumsum(steps, axis=0)
    return PoseSequence(positions, random_rotation(rng, M + 1))


def random_rig(rng: np.random.Generator) -> CameraRig:
    return CameraRig(R_c=random_rotation(rng), x_c=rng.normal(scale=0.2, size=3), fov_half_angle=0.8, max_range=100.0)


def random_track(rng: np.random.Generator, M: int, n_f: int, fid: int = 0, poses=None, rig=None, sigma: float = 1.0):
    """Random track with ``n_f`` frames out of ``M+1``; visibility gates are not applied.

    Retries until the track passes the triangulability guard. Returns
    ``(track, info, poses, rig)``.
    """
    poses = poses if poses is not None else random_poses(rng, M)
    rig = rig if rig is not None else random_rig(rng)
    while True:
        frames = sorted(rng.choice(M + 1, size=n_f, replace=False).tolist())
        y = rng.normal(scale=10.0, size=3)
        track = make_track(fid, y, poses, rig, frames=frames)
        try:
            info = feature_information(track.F, track.E, sigma, fid=fid)
        except TriangulationError:
            continue
        return track, info, poses, rig


def random_objective(rng: np.random.Generator, n: int, M: int = 3, sigma: float = 1.0) -> Objective:
    """Selection instance on a shared random horizon with ``n`` triangulable features."""
    A = np.eye(3) + rng.normal(scale=0.05, size=(3, 3))
    Lam = np.diag(rng.uniform(0.02, 0.2, size=3))
    model = MotionModel(A=A, B=np.eye(3), Lambda=Lam)
    prior = propagate_prior(model, np.zeros(3), 0.05 * np.eye(3), np.zeros((M, 3)), M)
    poses = random_poses(rng, M)
    rig = random_rig(rng)
    infos = []
    for fid in range(n):
        n_f = int(rng.integers(2, M + 2))
        _, info, _, _ = random_track(rng, M, n_f, fid=fid, poses=poses, rig=rig, sigma=sigma)
        infos.append(info)
    return Objective(prior.Hbar, infos, sigma=sigma)


def random_nested(rng: np.random.Generator, ids: list[int]):
    """Random ``A ⊆ B`` and ``e ∉ B`` over ``ids``."""
    ids = list(ids)
    perm = rng.permutation(len(ids))
    e = ids[perm[0]]
    rest = [ids[i] for i in perm[1:]]
    b_size = int(rng.integers(0, len(rest) + 1))
    B = rest[:b_size]
    a_size = int(rng.integers(0, b_size + 1))
    A = B[:a_size]
    return set(A), set(B), e


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def check_trace_identity(rng, tracks: int = 500, M_range=(3, 20)) -> list[Check]:
    worst_trace = 0.0
    worst_proj = 0.0
    for _ in range(tracks):
        M = int(rng.integers(M_range[0], M_range[1] + 1))
        n_f = int(rng.integers(2, M + 2))
        track, info, _, _ = random_track(rng, M, n_f)
        expected = 2 * n_f - 3
        worst_trace = max(worst_trace, abs(info.trace - expected) / expected)
        for i in range(n_f):
            Ei = track.E[3 * i : 3 * i + 3]
            P = Ei.T @ Ei
            worst_proj = max(worst_proj, float(np.max(np.abs(P @ P - P))))
    return [
        Check("trace identity tr(H) = 2n_f - 3", worst_trace <= 1e-8, f"{tracks} tracks, max rel err {worst_trace:.2e}"),
        Check("per-frame E_i^T E_i idempotent", worst_proj <= 1e-10, f"max abs err {worst_proj:.2e}"),
    ]


def check_submodularity(rng, triples: int = 1000, n: int = 10, M: int = 3, per_instance: int = 50) -> list[Check]:
    sub_viol = mono_viol = 0
    obj = None
    for t in range(triples):
        if t % per_instance == 0:
            obj = random_objective(rng, n, M)
        A, B, e = random_nested(rng, obj.ids)
        if obj.rho(A) > obj.rho(B) + 1e-10:
            mono_viol += 1
        if obj.marginal_gain(A, e) < obj.marginal_gain(B, e) - 1e-10:
            sub_viol += 1
    return [
        Check("monotonicity", mono_viol == 0, f"{mono_viol} violations in {triples} nested pairs"),
        Check("submodularity", sub_viol == 0, f"{sub_viol} violations in {triples} triples"),
    ]


def check_greedy_ratio(rng, instances: int = 50, n: int = 10, q: int = 3) -> Check:
    bound = 1 - 1 / math.e
    worst = math.inf
    fails = 0
    for _ in range(instances):
        obj = random_objective(rng, n)
        opt = brute_force(obj, q).objective_value
        g = greedy(obj, q).objective_value
        worst = min(worst, g / opt)
        if g < bound * opt - 1e-9:
            fails += 1
    return Check("greedy >= (1-1/e) opt", fails == 0, f"{instances} instances, worst ratio {worst:.4f}")


def check_stochastic_ratio(rng, instances: int = 20, n: int = 12, q: int = 3, epsilon: float = 0.2, seeds: int = 200) -> Check:
    bound = 1 - 1 / math.e - epsilon
    worst = math.inf
    fails = 0
    for _ in range(instances):
        obj = random_objective(rng, n)
        opt = brute_force(obj, q).objective_value
        mean = np.mean([stochastic_greedy(obj, q, epsilon, seed=s).objective_value for s in range(seeds)])
        worst = min(worst, mean / opt)
        if mean < bound * opt:
            fails += 1
    return Check("stochastic mean >= (1-1/e-eps) opt", fails == 0, f"{instances} instances x {seeds} seeds, worst ratio {worst:.4f}")


def run_all(seed: int = 0, quick: bool = False) -> list[Check]:
    rng = np.random.Generator(np.random.PCG64(seed))
    scale = 10 if quick else 1
    checks = []
    checks += check_trace_identity(rng, tracks=500 // scale)
    checks += check_submodularity(rng, triples=1000 // scale)
    checks.append(check_greedy_ratio(rng, instances=50 // scale))
    checks.append(check_stochastic_ratio(rng, instances=max(2, 20 // scale), seeds=200 // scale))
    return checks
