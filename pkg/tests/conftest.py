import copy

import numpy as np
import pytest

CORRIDOR = {
    "version": 1,
    "horizon": 10,
    "trajectory": {"kind": "line", "heading": 0.0, "step": 0.5},
    "motion": {"process_noise": 0.01, "initial_covariance": 0.01},
    "rig": {"fov_half_angle": 0.6, "max_range": 40.0},
    "features": {"count": 60, "box_min": [2.0, -12.0, -3.0], "box_max": [30.0, 12.0, 3.0], "seed": 3},
    "sigma": 1.0,
    "q": 5,
    "epsilon": 0.1,
    "seeds": [0, 1, 2],
    "algorithms": ["greedy", "stochastic", "surrogate"],
}

# every feature inside the FOV and range in every frame of the corridor
CLEAR_BOX = {"box_min": [15.0, -4.0, -3.0], "box_max": [30.0, 4.0, 3.0]}


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240611))


@pytest.fixture
def corridor():
    return copy.deepcopy(CORRIDOR)


def random_spd(rng, d, floor=0.5):
    X = rng.normal(size=(d, d))
    return X @ X.T + floor * np.eye(d)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" or "test_acceptance" not in rep.nodeid:
                continue
            props = dict(rep.user_properties)
            lines.append((props.get("criterion", 99), f"[{'PASS' if rep.passed else 'FAIL'}] {rep.nodeid.split('::')[-1]}: {props.get('detail', '')}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
