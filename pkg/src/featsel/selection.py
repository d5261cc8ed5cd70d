"""Cardinality-constrained feature selection on the normalized log-det objective.

``rho(S) = logdet(Hbar + sum_{f in S} H_f) - logdet(Hbar)``

Selectors:
    greedy             -- classic greedy, every remaining candidate every round
    stochastic_greedy  -- greedy over a random sample of ``ceil(n/q ln(1/eps))`` per round
    surrogate_greedy   -- top-q by frame count, no information matrices involved
    brute_force        -- exhaustive oracle over all size-q subsets

Ties are always broken towards the smallest feature id.
"""

from __future__ import annotations

import itertools
import math
import threading
import time
from collections.abc import Iterable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from featsel.numerics import as_symmetric, batched_logdet, cholesky, cholesky_logdet, eig_extremes, spd_inverse
from featsel.vision import FeatureInfo, FeatureTrack

BRUTE_FORCE_LIMIT = 10**6
RNG_NAME = "numpy.random.PCG64"


class GuardRefusal(ValueError):
    """Instance is too large for exhaustive enumeration."""


@dataclass
class SelectionResult:
    algorithm: str
    selected: list[int]
    objective_value: float | None
    measures: dict[str, float]
    eval_count: int
    wall_time: float
    seed: int | None = None
    logdet_evals: int = 0
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "selected": list(self.selected),
            "objective_value": self.objective_value,
            "measures": dict(self.measures),
            "eval_count": self.eval_count,
            "logdet_evals": self.logdet_evals,
            "wall_time": self.wall_time,
            "seed": self.seed,
            "warnings": list(self.warnings),
        }


class Objective:
    """Normalized log-det gain over a fixed candidate pool.

    ``eval_count`` counts marginal-gain evaluations; ``logdet_evals`` counts every
    log-determinant factorization made through this object.
    """

    def __init__(self, Hbar, candidates, sigma: float = 1.0):
        self.Hbar = as_symmetric(Hbar)
        cholesky(self.Hbar)
        if isinstance(candidates, Mapping):
            infos = list(candidates.values())
        else:
            infos = list(candidates)
        infos.sort(key=lambda c: c.id)
        self.candidates: dict[int, FeatureInfo] = {c.id: c for c in infos}
        if len(self.candidates) != len(infos):
            raise ValueError("duplicate candidate ids")
        self.sigma = sigma
        self.ids = [c.id for c in infos]
        self._index = {fid: i for i, fid in enumerate(self.ids)}
        d = self.Hbar.shape[0]
        self._stack = np.stack([c.H for c in infos]) if infos else np.zeros((0, d, d))
        if self._stack.shape[1:] != (d, d):
            raise ValueError(f"candidate matrices must be {d}x{d}")
        self.logdet_prior = cholesky_logdet(self.Hbar)
        self.eval_count = 0
        self.logdet_evals = 0
        self._lock = threading.Lock()

    def __len__(self):
        return len(self.ids)

    @property
    def dim(self) -> int:
        return self.Hbar.shape[0]

    def clone(self) -> "Objective":
        """Same (shared, read-only) data with fresh counters."""
        new = object.__new__(Objective)
        new.__dict__.update(self.__dict__)
        new.eval_count = 0
        new.logdet_evals = 0
        new._lock = threading.Lock()
        return new

    def _count(self, evals: int = 0, logdets: int = 0):
        with self._lock:
            self.eval_count += evals
            self.logdet_evals += logdets

    def _positions(self, S: Iterable[int]) -> list[int]:
        try:
            return [self._index[f] for f in S]
        except KeyError as exc:
            raise KeyError(f"unknown feature id {exc.args[0]}") from None

    def information(self, S: Iterable[int]) -> np.ndarray:
        pos = sorted(self._positions(S))
        H = self.Hbar.copy()
        for p in pos:
            H += self._stack[p]
        return H

    def rho(self, S: Iterable[int]) -> float:
        S = set(S)
        if not S:
            self._positions(S)
            return 0.0
        self._count(logdets=1)
        return cholesky_logdet(self.information(S), jitter=True) - self.logdet_prior

    def marginal_gain(self, S: Iterable[int], f: int) -> float:
        S = set(S)
        if f in S:
            raise ValueError(f"feature {f} is already in the set")
        if f not in self._index:
            raise KeyError(f"unknown feature id {f}")
        H = self.information(S)
        self._count(evals=1, logdets=2)
        return cholesky_logdet(H + self.candidates[f].H, jitter=True) - cholesky_logdet(H, jitter=True)

    def batch_logdet(self, H_run: np.ndarray, ids: list[int], pool: ThreadPoolExecutor | None = None, threads: int = 1) -> np.ndarray:
        """``logdet(H_run + H_f)`` for every ``f`` in ``ids``; counted as marginal-gain evaluations."""
        pos = np.asarray(self._positions(ids), dtype=int)
        self._count(evals=len(ids), logdets=len(ids))
        if pool is None or len(pos) < 2:
            return batched_logdet(self._stack[pos] + H_run)
        chunks = [c for c in np.array_split(pos, threads) if len(c)]
        parts = pool.map(lambda c: batched_logdet(self._stack[c] + H_run), chunks)
        return np.concatenate(list(parts))


def evaluate_measures(H) -> dict[str, float]:
    """Variance ``tr(H^-1)``, entropy ``-logdet H`` and spectral ``lambda_min(H^-1)``."""
    H = as_symmetric(H)
    inv = spd_inverse(H)
    _, lmax = eig_extremes(H)
    return {
        "variance": float(np.trace(inv)),
        "entropy": -cholesky_logdet(H),
        "spectral": 1.0 / lmax,
    }


def _clamp(q: int, n: int) -> tuple[int, list[str]]:
    if q < 0:
        raise ValueError("q must be non-negative")
    if q > n:
        return n, [f"q={q} clamped to the {n} triangulable candidates"]
    return q, []


def sample_size(n: int, q: int, epsilon: float) -> int:
    """Per-round sample size ``ceil((n/q) ln(1/epsilon))``."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if q < 1:
        raise ValueError("q must be at least 1")
    return max(1, math.ceil(n / q * math.log(1.0 / epsilon)))


def _pool(threads: int):
    return ThreadPoolExecutor(max_workers=threads) if threads > 1 else None


def _greedy_rounds(obj: Objective, q: int, pick_pool, threads: int):
    """Shared greedy loop. ``pick_pool(remaining)`` returns the ascending ids to evaluate."""
    remaining = list(obj.ids)
    H = obj.Hbar.copy()
    ld = obj.logdet_prior
    selected: list[int] = []
    pool = _pool(threads)
    try:
        for _ in range(q):
            cand = pick_pool(remaining)
            lds = obj.batch_logdet(H, cand, pool, threads)
            best = int(np.argmax(lds))
            f = cand[best]
            selected.append(f)
            remaining.remove(f)
            H = H + obj.candidates[f].H
            ld = float(lds[best])
    finally:
        if pool is not None:
            pool.shutdown()
    return selected, H, ld


def _finish(obj: Objective, name, selected, H, ld, evals0, logdets0, t0, seed=None, warnings=()):
    wall = time.perf_counter() - t0
    return SelectionResult(
        algorithm=name,
        selected=selected,
        objective_value=ld - obj.logdet_prior if selected else 0.0,
        measures=evaluate_measures(H),
        eval_count=obj.eval_count - evals0,
        wall_time=wall,
        seed=seed,
        logdet_evals=obj.logdet_evals - logdets0,
        warnings=list(warnings),
    )


def greedy(obj: Objective, q: int, threads: int = 1) -> SelectionResult:
    """Classic greedy: ``sum_{k<q} (n - k)`` marginal-gain evaluations."""
    q, warnings = _clamp(q, len(obj))
    evals0, logdets0 = obj.eval_count, obj.logdet_evals
    t0 = time.perf_counter()
    selected, H, ld = _greedy_rounds(obj, q, lambda remaining: remaining, threads)
    return _finish(obj, "greedy", selected, H, ld, evals0, logdets0, t0, warnings=warnings)


def stochastic_greedy(obj: Objective, q: int, epsilon: float, seed: int | None = None, threads: int = 1) -> SelectionResult:
    """Greedy over a uniform sample (without replacement) of the remaining pool each round."""
    if q < 1:
        raise ValueError("q must be at least 1")
    q, warnings = _clamp(q, len(obj))
    if seed is None:
        seed = int(np.random.SeedSequence().entropy) & (2**64 - 1)
    s = sample_size(len(obj), max(q, 1), epsilon)
    rng = np.random.Generator(np.random.PCG64(seed))

    def pick(remaining):
        m = min(s, len(remaining))
        idx = np.sort(rng.choice(len(remaining), size=m, replace=False))
        return [remaining[i] for i in idx]

    evals0, logdets0 = obj.eval_count, obj.logdet_evals
    t0 = time.perf_counter()
    selected, H, ld = _greedy_rounds(obj, q, pick, threads)
    return _finish(obj, "stochastic", selected, H, ld, evals0, logdets0, t0, seed=seed, warnings=warnings)


def _frame_count(c) -> int:
    if isinstance(c, (FeatureInfo, FeatureTrack)):
        return c.n_f
    return int(c)


def surrogate_greedy(source, q: int, Hbar=None) -> SelectionResult:
    """Top-q candidates by frame count (descending, ties to the smaller id).

    ``source`` is an :class:`Objective` or a mapping ``id -> n_f`` (or FeatureInfo /
    FeatureTrack). Measures and the objective value are filled in after the
    timed selection phase, and only when a prior is available.
    """
    if isinstance(source, Objective):
        obj = source
        items = obj.candidates.items()
    else:
        obj = None
        items = source.items()
    logdets0 = obj.logdet_evals if obj is not None else 0

    t0 = time.perf_counter()
    scores = [(-_frame_count(c), fid) for fid, c in items]
    q, warnings = _clamp(q, len(scores))
    selected = [fid for _, fid in sorted(scores)[:q]]
    wall = time.perf_counter() - t0
    logdets = (obj.logdet_evals - logdets0) if obj is not None else 0

    objective_value = None
    measures: dict[str, float] = {}
    if obj is None and Hbar is not None:
        obj = Objective(Hbar, [source[f] for f in selected])
    if obj is not None:
        measured = obj.clone()
        objective_value = measured.rho(selected)
        measures = evaluate_measures(measured.information(selected))
    return SelectionResult(
        algorithm="surrogate",
        selected=selected,
        objective_value=objective_value,
        measures=measures,
        eval_count=len(scores),
        wall_time=wall,
        logdet_evals=logdets,
        warnings=warnings,
    )


def brute_force(obj: Objective, q: int, limit: int = BRUTE_FORCE_LIMIT, chunk: int = 4096) -> SelectionResult:
    """Exhaustive maximizer of ``rho`` over all size-q subsets.

    Ties resolve to the lexicographically smallest id tuple.
    """
    n = len(obj)
    q, warnings = _clamp(q, n)
    total = math.comb(n, q)
    if total > limit:
        raise GuardRefusal(f"C({n}, {q}) = {total} subsets exceeds the brute-force bound of {limit}")
    evals0, logdets0 = obj.eval_count, obj.logdet_evals
    t0 = time.perf_counter()
    if q == 0:
        return _finish(obj, "brute", [], obj.Hbar.copy(), obj.logdet_prior, evals0, logdets0, t0)

    best_val = -np.inf
    best: tuple[int, ...] = ()
    combos = itertools.combinations(range(n), q)
    while True:
        block = list(itertools.islice(combos, chunk))
        if not block:
            break
        idx = np.asarray(block, dtype=int)
        mats = obj._stack[idx].sum(axis=1) + obj.Hbar
        vals = batched_logdet(mats)
        obj._count(logdets=len(block))
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val = float(vals[k])
            best = block[k]
    obj._count(evals=total)
    selected = [obj.ids[i] for i in best]
    H = obj.information(selected)
    return _finish(obj, "brute", selected, H, best_val, evals0, logdets0, t0, warnings=warnings)


ALGORITHMS = ("greedy", "stochastic", "surrogate", "brute")


def run_algorithm(name: str, obj: Objective, q: int, epsilon: float = 0.1, seed: int | None = None, threads: int = 1) -> SelectionResult:
    if name == "greedy":
        res = greedy(obj, q, threads=threads)
    elif name == "stochastic":
        res = stochastic_greedy(obj, q, epsilon, seed=seed, threads=threads)
    elif name == "surrogate":
        res = surrogate_greedy(obj, q)
    elif name == "brute":
        res = brute_force(obj, q)
    else:
        raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")
    if res.seed is None:
        res.seed = seed
    return res
