from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from featsel.bench.config import ScenarioConfig
from featsel.bench.scenario import Scenario, generate_scenario
from featsel.selection import ALGORITHMS, BRUTE_FORCE_LIMIT, RNG_NAME, GuardRefusal, SelectionResult, run_algorithm

COLUMNS = (
    "algorithm",
    "seed",
    "q",
    "epsilon",
    "n",
    "objective_value",
    "measure_variance",
    "measure_entropy",
    "measure_spectral",
    "eval_count",
    "wall_time_s",
    "selected_ids",
)
FLOAT_COLUMNS = ("epsilon", "objective_value", "measure_variance", "measure_entropy", "measure_spectral", "wall_time_s")


@dataclass
class BenchReport:
    digest: str
    candidate_digest: str
    rows: list[dict]
    rng: str = RNG_NAME
    construction_time_s: float = 0.0
    rejected: dict[int, str] = field(default_factory=dict)

    def without_timing(self) -> list[dict]:
        return [{k: v for k, v in r.items() if k != "wall_time_s"} for r in self.rows]


def _row(res: SelectionResult, seed: int, q: int, epsilon: float, n: int) -> dict:
    nan = float("nan")
    return {
        "algorithm": res.algorithm,
        "seed": seed,
        "q": q,
        "epsilon": epsilon,
        "n": n,
        "objective_value": res.objective_value if res.objective_value is not None else nan,
        "measure_variance": res.measures.get("variance", nan),
        "measure_entropy": res.measures.get("entropy", nan),
        "measure_spectral": res.measures.get("spectral", nan),
        "eval_count": res.eval_count,
        "wall_time_s": res.wall_time,
        "selected_ids": sorted(res.selected),
    }


def run_benchmark(cfg: ScenarioConfig, algorithms=None, threads: int = 1, scenario: Scenario | None = None) -> BenchReport:
    """Run every requested algorithm for every seed on one shared candidate set.

    Only the selection call is timed; scenario construction is reported separately.
    Rows come back ordered by (algorithm, seed) in request order, for any worker count.
    """
    algorithms = list(cfg.algorithms if algorithms is None else algorithms)
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    if scenario is None:
        scenario = generate_scenario(cfg)
    base = scenario.objective()
    n = len(base)
    if "brute" in algorithms and math.comb(n, min(cfg.q, n)) > BRUTE_FORCE_LIMIT:
        raise GuardRefusal(f"C({n}, {cfg.q}) exceeds the brute-force bound of {BRUTE_FORCE_LIMIT}")

    tasks = [(a, s) for a in algorithms for s in cfg.seeds]

    def work(task):
        algo, seed = task
        res = run_algorithm(algo, base.clone(), cfg.q, epsilon=cfg.epsilon, seed=seed)
        return _row(res, seed, cfg.q, cfg.epsilon, n)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, tasks))
    else:
        rows = [work(t) for t in tasks]
    return BenchReport(
        digest=scenario.digest,
        candidate_digest=scenario.candidate_digest,
        rows=rows,
        construction_time_s=scenario.build_time,
        rejected=dict(scenario.rejected),
    )


def _fmt(v) -> str:
    return format(v, ".12g")


def _round12(v: float) -> float:
    return float(_fmt(v))


def format_row(row: dict) -> dict:
    """Row as it appears on disk: floats at 12 significant digits, ids ascending and ';'-joined."""
    out = {}
    for col in COLUMNS:
        v = row[col]
        if col == "selected_ids":
            out[col] = ";".join(str(i) for i in sorted(v))
        elif col in FLOAT_COLUMNS:
            out[col] = _fmt(float(v))
        else:
            out[col] = v
    return out


def emit_report(report: BenchReport, fmt: str, path) -> Path:
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
            writer.writeheader()
            for row in report.rows:
                writer.writerow(format_row(row))
    elif fmt == "json":
        rows = []
        for row in report.rows:
            r = format_row(row)
            for col in FLOAT_COLUMNS:
                r[col] = _round12(row[col])
            rows.append(r)
        doc = {
            "scenario_digest": report.digest,
            "candidate_digest": report.candidate_digest,
            "rng": report.rng,
            "construction_time_s": _round12(report.construction_time_s),
            "rejected": [{"id": k, "reason": v} for k, v in report.rejected.items()],
            "columns": list(COLUMNS),
            "rows": rows,
        }
        path.write_text(json.dumps(doc, indent=2) + "\n")
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return path
