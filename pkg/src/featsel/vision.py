"""Bearing-only camera model over a prediction horizon.

Each frame contributes the 3-row constraint ``U (R R_c)^T (x_k - y) = noise``,
where ``U`` is the cross-product matrix of the unit bearing. Stacking those
constraints gives ``F x + E y``; marginalizing the landmark ``y`` out of the
joint information gives the per-feature information matrix on the horizon.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from featsel.numerics import IllConditionedError, schur_complement, skew

ROTATION_TOL = 1e-9
MIN_DISTANCE = 1e-9


class DegenerateGeometryError(ValueError):
    pass


class TriangulationError(ValueError):
    """The landmark block ``E^T E`` is not invertible, so the feature cannot be selected."""


def _check_rotation(R: np.ndarray, name: str) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise ValueError(f"{name} must be 3x3, got {R.shape}")
    if np.max(np.abs(R.T @ R - np.eye(3))) > ROTATION_TOL or abs(np.linalg.det(R) - 1.0) > ROTATION_TOL:
        raise ValueError(f"{name} is not a proper rotation")
    return R


@dataclass(frozen=True)
class CameraRig:
    R_c: np.ndarray
    x_c: np.ndarray
    fov_half_angle: float
    max_range: float

    def __post_init__(self):
        object.__setattr__(self, "R_c", _check_rotation(self.R_c, "R_c"))
        object.__setattr__(self, "x_c", np.asarray(self.x_c, dtype=float).reshape(3))
        if not 0.0 < self.fov_half_angle < np.pi / 2:
            raise ValueError("fov_half_angle must lie in (0, pi/2)")
        if self.max_range <= 0:
            raise ValueError("max_range must be positive")


@dataclass(frozen=True)
class PoseSequence:
    positions: np.ndarray  # (M+1, 3)
    rotations: np.ndarray  # (M+1, 3, 3)

    def __post_init__(self):
        P = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        R = np.asarray(self.rotations, dtype=float).reshape(-1, 3, 3)
        if len(P) != len(R):
            raise ValueError("positions and rotations differ in length")
        for k, Rk in enumerate(R):
            _check_rotation(Rk, f"rotation[{k}]")
        object.__setattr__(self, "positions", P)
        object.__setattr__(self, "rotations", R)

    def __len__(self):
        return len(self.positions)

    @property
    def M(self) -> int:
        return len(self.positions) - 1

    def camera_center(self, k: int, rig: CameraRig) -> np.ndarray:
        return self.positions[k] + self.rotations[k] @ rig.x_c

    def camera_rotation(self, k: int, rig: CameraRig) -> np.ndarray:
        """World-from-camera rotation ``R_k R_c``."""
        return self.rotations[k] @ rig.R_c


@dataclass(frozen=True)
class FeatureTrack:
    id: int
    y: np.ndarray
    frames: tuple[int, ...]
    bearings: np.ndarray  # (n_f, 3), camera frame
    F: np.ndarray = field(repr=False)
    E: np.ndarray = field(repr=False)

    @property
    def n_f(self) -> int:
        return len(self.frames)


@dataclass(frozen=True)
class FeatureInfo:
    id: int
    H: np.ndarray = field(repr=False)
    n_f: int
    trace: float


def simulate_visibility(poses: PoseSequence, rig: CameraRig, y) -> tuple[list[int], np.ndarray]:
    """Frames where ``y`` is inside the range/FOV cone, plus unit bearings in the camera frame."""
    y = np.asarray(y, dtype=float).reshape(3)
    cos_fov = np.cos(rig.fov_half_angle)
    frames: list[int] = []
    bearings: list[np.ndarray] = []
    for k in range(len(poses)):
        c = poses.camera_center(k, rig)
        Rwc = poses.camera_rotation(k, rig)
        d = y - c
        dist = np.linalg.norm(d)
        if dist < MIN_DISTANCE:
            raise DegenerateGeometryError(f"feature coincides with the camera center at frame {k}")
        if dist > rig.max_range:
            continue
        if Rwc[:, 2] @ d / dist < cos_fov:
            continue
        frames.append(k)
        bearings.append(Rwc.T @ d / dist)
    return frames, np.array(bearings).reshape(-1, 3)


def build_FE(frames, bearings, poses: PoseSequence, rig: CameraRig, M: int) -> tuple[np.ndarray, np.ndarray]:
    """Stacked measurement matrices for one feature.

    Row block ``i`` of ``F`` is ``U_i (R_k R_c)^T`` placed at the column block of
    frame ``k = frames[i]``; the matching block of ``E`` is its negative.
    """
    frames = list(frames)
    bearings = np.asarray(bearings, dtype=float).reshape(-1, 3)
    n_f = len(frames)
    if n_f == 0:
        raise ValueError("feature has no visible frames")
    if n_f != len(bearings):
        raise ValueError("frames and bearings differ in length")
    F = np.zeros((3 * n_f, 3 * (M + 1)))
    E = np.zeros((3 * n_f, 3))
    for i, (k, u) in enumerate(zip(frames, bearings)):
        block = skew(u) @ poses.camera_rotation(k, rig).T
        F[3 * i : 3 * i + 3, 3 * k : 3 * k + 3] = block
        E[3 * i : 3 * i + 3] = -block
    return F, E


def make_track(fid: int, y, poses: PoseSequence, rig: CameraRig, frames=None) -> FeatureTrack:
    """Assemble a track. With ``frames=None`` visibility is simulated; otherwise
    bearings are computed for the given frames without the FOV/range gate."""
    y = np.asarray(y, dtype=float).reshape(3)
    if frames is None:
        frames, bearings = simulate_visibility(poses, rig, y)
    else:
        frames = sorted(frames)
        bearings = []
        for k in frames:
            d = y - poses.camera_center(k, rig)
            dist = np.linalg.norm(d)
            if dist < MIN_DISTANCE:
                raise DegenerateGeometryError(f"feature coincides with the camera center at frame {k}")
            bearings.append(poses.camera_rotation(k, rig).T @ d / dist)
        bearings = np.array(bearings).reshape(-1, 3)
    if len(frames) == 0:
        F = np.zeros((0, 3 * len(poses)))
        E = np.zeros((0, 3))
    else:
        F, E = build_FE(frames, bearings, poses, rig, poses.M)
    return FeatureTrack(id=fid, y=y, frames=tuple(frames), bearings=bearings, F=F, E=E)


def feature_information(F, E, sigma: float = 1.0, fid: int = -1) -> FeatureInfo:
    """Information the feature carries about the horizon states.

    ``H = sigma^-2 (F^T F - F^T E (E^T E)^-1 E^T F)``. Raises
    :class:`TriangulationError` when ``E^T E`` fails the condition guard.
    """
    F = np.asarray(F, dtype=float)
    E = np.asarray(E, dtype=float)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    n_f = F.shape[0] // 3
    if n_f < 2:
        raise TriangulationError(f"feature {fid}: {n_f} frame(s), at least 2 are needed")
    try:
        H = schur_complement(F.T @ F, F.T @ E, E.T @ E)
    except IllConditionedError as exc:
        raise TriangulationError(f"feature {fid}: landmark block is not invertible ({exc})") from exc
    H = H / sigma**2
    return FeatureInfo(id=fid, H=H, n_f=n_f, trace=float(np.trace(H)))


def track_information(track: FeatureTrack, sigma: float = 1.0) -> FeatureInfo:
    return feature_information(track.F, track.E, sigma, fid=track.id)


def feature_trace_shortcut(n_f: int, sigma: float = 1.0) -> float:
    """Trace of a feature's information matrix from its frame count alone."""
    if n_f < 2:
        raise ValueError("n_f must be at least 2")
    return (2 * n_f - 3) / sigma**2
