from featsel.bench.config import ConfigError, ScenarioConfig, load_config, parse_config
from featsel.bench.report import COLUMNS, BenchReport, emit_report, run_benchmark
from featsel.bench.scenario import Scenario, ScenarioInfeasible, generate_scenario

__all__ = [
    "COLUMNS",
    "BenchReport",
    "ConfigError",
    "Scenario",
    "ScenarioConfig",
    "ScenarioInfeasible",
    "emit_report",
    "generate_scenario",
    "load_config",
    "parse_config",
    "run_benchmark",
]
