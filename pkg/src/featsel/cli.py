"""Command-line entry point: ``featsel {gen,select,bench,verify}``.

Exit codes: 0 success, 2 config error, 3 infeasible scenario, 4 guard refusal.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from featsel.bench import ConfigError, ScenarioInfeasible, emit_report, generate_scenario, load_config, run_benchmark
from featsel.selection import ALGORITHMS, GuardRefusal, run_algorithm

EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_GUARD = 4


def _algos(text: str) -> list[str]:
    algos = [a.strip() for a in text.split(",") if a.strip()]
    for a in algos:
        if a not in ALGORITHMS:
            raise argparse.ArgumentTypeError(f"unknown algorithm {a!r}; choose from {','.join(ALGORITHMS)}")
    return algos


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="featsel", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="emit the resolved scenario and its digest")
    gen.add_argument("--config", required=True)
    gen.add_argument("--seed", type=_u64, help="override the feature placement seed")
    gen.add_argument("--out")

    sel = sub.add_parser("select", help="run one algorithm with one seed")
    sel.add_argument("--config", required=True)
    sel.add_argument("--algos", type=_algos, default=["greedy"], help="a single algorithm")
    sel.add_argument("--seed", type=_u64, default=0)
    sel.add_argument("--threads", type=int, default=1)
    sel.add_argument("--out")

    bench = sub.add_parser("bench", help="run the algorithm x seed matrix and write a report")
    bench.add_argument("--config", required=True)
    bench.add_argument("--algos", type=_algos)
    bench.add_argument("--seed", type=_u64, action="append", help="replace the configured seeds (repeatable)")
    bench.add_argument("--threads", type=int, default=1)
    bench.add_argument("--format", choices=("csv", "json"), default="csv")
    bench.add_argument("--out", required=True)

    ver = sub.add_parser("verify", help="run the randomized property suites")
    ver.add_argument("--seed", type=_u64, default=0)
    ver.add_argument("--quick", action="store_true", help="10x smaller samples")
    return p


def _write(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run(args) -> int:
    if args.command == "verify":
        from featsel.verify import run_all

        checks = run_all(seed=args.seed, quick=args.quick)
        for c in checks:
            print(c.line())
        return 0 if all(c.passed for c in checks) else 1

    cfg = load_config(args.config)
    if args.command == "gen":
        scenario = generate_scenario(cfg, seed=args.seed)
        _write(json.dumps(scenario.summary(), indent=2) + "\n", args.out)
        return 0

    if args.command == "select":
        if len(args.algos) != 1:
            raise ConfigError("select takes exactly one algorithm")
        scenario = generate_scenario(cfg)
        res = run_algorithm(args.algos[0], scenario.objective(), cfg.q, epsilon=cfg.epsilon, seed=args.seed, threads=args.threads)
        doc = res.to_dict()
        doc["scenario_digest"] = scenario.digest
        _write(json.dumps(doc, indent=2) + "\n", args.out)
        return 0

    if args.seed:
        cfg = cfg.model_copy(update={"seeds": list(args.seed)})
    report = run_benchmark(cfg, algorithms=args.algos, threads=args.threads)
    emit_report(report, args.format, args.out)
    print(f"wrote {len(report.rows)} rows to {args.out} (scenario {report.digest[:12]})", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ScenarioInfeasible as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except GuardRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
