"""Exit criteria for the package, one test per criterion.

Each test records a one-line detail; the terminal summary prints PASS/FAIL per criterion.
"""

import json
import math
import time

import numpy as np
import pytest
import yaml
from scipy.linalg import block_diag

from conftest import random_spd
from featsel.cli import main
from featsel.selection import brute_force, evaluate_measures, greedy, sample_size, stochastic_greedy, surrogate_greedy
from featsel.verify import random_nested, random_objective, random_track


def gen(seed):
    return np.random.Generator(np.random.PCG64(seed))


@pytest.fixture(scope="module")
def tracks_500():
    rng = gen(1)
    out = []
    t0 = time.perf_counter()
    for _ in range(500):
        M = int(rng.integers(3, 21))
        n_f = int(rng.integers(2, M + 2))
        track, info, _, _ = random_track(rng, M, n_f, sigma=1.0)
        out.append((track, info))
    return out, time.perf_counter() - t0


def test_c01_trace_identity(tracks_500, record_property):
    record_property("criterion", 1)
    tracks, elapsed = tracks_500
    worst = max(abs(info.trace - (2 * info.n_f - 3)) / (2 * info.n_f - 3) for _, info in tracks)
    record_property("detail", f"500 tracks, max rel err {worst:.2e} (tol 1e-8), {elapsed:.2f}s")
    assert worst <= 1e-8
    assert elapsed < 10


def test_c02_projector_lemma(tracks_500, record_property):
    record_property("criterion", 2)
    worst = 0.0
    for track, _ in tracks_500[0]:
        for i in range(track.n_f):
            Ei = track.E[3 * i : 3 * i + 3]
            P = Ei.T @ Ei
            worst = max(worst, float(np.max(np.abs(P @ P - P))))
    record_property("detail", f"max |P^2 - P| {worst:.2e} (tol 1e-10)")
    assert worst <= 1e-10


def test_c03_submodular_monotone(record_property):
    record_property("criterion", 3)
    rng = gen(3)
    t0 = time.perf_counter()
    mono = sub = 0
    for t in range(1000):
        if t % 50 == 0:
            obj = random_objective(rng, 10, M=4)
        A, B, e = random_nested(rng, obj.ids)
        mono += obj.rho(A) > obj.rho(B) + 1e-10
        sub += obj.marginal_gain(A, e) < obj.marginal_gain(B, e) - 1e-10
    elapsed = time.perf_counter() - t0
    record_property("detail", f"1000 triples: {mono} monotonicity, {sub} submodularity violations, {elapsed:.2f}s")
    assert mono == 0 and sub == 0
    assert elapsed < 30


def test_c04_greedy_ratio(record_property):
    record_property("criterion", 4)
    rng = gen(4)
    t0 = time.perf_counter()
    ratios = []
    for _ in range(50):
        obj = random_objective(rng, 10)
        opt = brute_force(obj, 3).objective_value
        g = greedy(obj, 3).objective_value
        assert g >= (1 - 1 / math.e) * opt - 1e-9
        ratios.append(g / opt)
    elapsed = time.perf_counter() - t0
    record_property("detail", f"50 instances, worst ratio {min(ratios):.4f} vs bound {1 - 1 / math.e:.4f}, {elapsed:.2f}s")
    assert elapsed < 60


def test_c05_stochastic_expectation(record_property):
    record_property("criterion", 5)
    rng = gen(5)
    eps = 0.2
    bound = 1 - 1 / math.e - eps
    t0 = time.perf_counter()
    worst = math.inf
    for _ in range(20):
        obj = random_objective(rng, 12)
        opt = brute_force(obj, 3).objective_value
        mean = np.mean([stochastic_greedy(obj, 3, eps, seed=s).objective_value for s in range(200)])
        worst = min(worst, mean / opt)
        assert mean >= bound * opt
    elapsed = time.perf_counter() - t0
    record_property("detail", f"20 instances x 200 seeds, worst mean ratio {worst:.4f} vs bound {bound:.4f}, {elapsed:.2f}s")
    assert elapsed < 300


@pytest.mark.parametrize("n,q,eps", [(12, 3, 0.2), (50, 7, 0.1), (100, 10, 0.05), (40, 40, 0.5), (30, 4, 0.01), (200, 20, 0.1)])
def test_c06_evaluation_counts(n, q, eps, record_property):
    record_property("criterion", 6)
    obj = random_objective(gen(n * 1000 + q), n, M=2)
    s = sample_size(n, q, eps)
    expected = sum(min(s, n - k) for k in range(q))
    st = stochastic_greedy(obj, q, eps, seed=1)
    g = greedy(obj, q)
    record_property("detail", f"n={n} q={q} eps={eps}: stochastic {st.eval_count}, greedy {g.eval_count}")
    assert st.eval_count == expected
    assert st.eval_count <= math.ceil(n * math.log(1 / eps)) + q
    assert g.eval_count == sum(n - k for k in range(q))


def test_c07_surrogate(record_property):
    record_property("criterion", 7)
    rng = gen(7)
    for n in (5, 20, 60):
        obj = random_objective(rng, n, M=6)
        for q in (1, 3, n):
            res = surrogate_greedy(obj, q)
            oracle = sorted(obj.ids, key=lambda f: (-obj.candidates[f].n_f, f))[:q]
            assert res.selected == oracle
            assert res.logdet_evals == 0

    big = random_objective(rng, 2000, M=10)
    sur = surrogate_greedy(big.clone(), 50)
    gre = greedy(big.clone(), 50)
    speedup = gre.wall_time / sur.wall_time
    record_property("detail", f"n=2000 q=50: greedy {gre.wall_time:.3f}s, surrogate {sur.wall_time * 1e3:.3f}ms, speedup {speedup:.0f}x")
    assert sur.logdet_evals == 0
    assert speedup >= 100


def test_c08_degeneracy(record_property):
    record_property("criterion", 8)
    rng = gen(8)
    for i in range(20):
        n, q = int(rng.integers(5, 15)), int(rng.integers(1, 5))
        obj = random_objective(rng, n)
        eps = math.exp(-q) / 2  # s = ceil((n/q) ln(1/eps)) > n
        assert sample_size(n, q, eps) >= n
        g = greedy(obj, q)
        st = stochastic_greedy(obj, q, eps, seed=int(rng.integers(2**63)))
        assert st.selected == g.selected
        assert st.objective_value == g.objective_value
        assert st.measures == g.measures
    record_property("detail", "20 instances bit-identical")


def test_c09_numerics_oracles(record_property):
    record_property("criterion", 9)
    rng = gen(9)
    worst_h = 0.0
    for _ in range(100):
        M = int(rng.integers(3, 12))
        track, info, _, _ = random_track(rng, M, int(rng.integers(2, M + 2)))
        F, E = track.F, track.E
        d = F.shape[1]
        omega = np.block([[F.T @ F, F.T @ E], [E.T @ F, E.T @ E]]) + block_diag(np.eye(d), np.zeros((3, 3)))
        expected = np.linalg.inv(np.linalg.inv(omega)[:d, :d]) - np.eye(d)
        worst_h = max(worst_h, float(np.max(np.abs(info.H - expected))))
    worst_m = 0.0
    for _ in range(100):
        H = random_spd(rng, int(rng.integers(1, 34)))
        inv = np.linalg.inv(H)
        m = evaluate_measures(H)
        ref = {"variance": np.trace(inv), "entropy": -np.linalg.slogdet(H)[1], "spectral": np.linalg.eigvalsh(inv)[0]}
        for k, v in ref.items():
            worst_m = max(worst_m, abs(m[k] - v) / max(1.0, abs(v)))
    record_property("detail", f"H vs joint inverse {worst_h:.2e} (tol 1e-8); measures {worst_m:.2e} (tol 1e-9)")
    assert worst_h <= 1e-8
    assert worst_m <= 1e-9


def test_c10_bench_determinism(tmp_path, corridor, record_property):
    record_property("criterion", 10)
    corridor.update(seeds=[0, 1, 2**64 - 1, 12345], algorithms=["greedy", "stochastic", "surrogate", "brute"], q=2)
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(yaml.safe_dump(corridor))
    docs = []
    for threads in (1, 1, 8, 8):
        out = tmp_path / f"r{len(docs)}.json"
        assert main(["bench", "--config", str(cfg), "--format", "json", "--out", str(out), "--threads", str(threads)]) == 0
        doc = json.loads(out.read_text())
        for row in doc["rows"]:
            row.pop("wall_time_s")
        doc.pop("construction_time_s")
        docs.append(doc)
    record_property("detail", f"{len(docs[0]['rows'])} rows identical across 1/1/8/8 workers")
    assert all(d == docs[0] for d in docs[1:])
