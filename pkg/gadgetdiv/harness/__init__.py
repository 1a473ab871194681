"""Benchmark suite, diversification runs, studies, program combination, reports and the CLI."""
from gadgetdiv.harness.combine import CombinedProgram, combine_program, search_space
from gadgetdiv.harness.config import HarnessConfig, load_config
from gadgetdiv.harness.report import RunReport, build_report, cli_report
from gadgetdiv.harness.runner import load_run, run_bench, run_diversify
from gadgetdiv.harness.study import gap_sweep, relax_rate_study, summarize_study
from gadgetdiv.harness.suite import BenchmarkSuite, load_function

__all__ = [
    "BenchmarkSuite", "CombinedProgram", "HarnessConfig", "RunReport", "build_report",
    "cli_report", "combine_program", "gap_sweep", "load_config", "load_function", "load_run",
    "relax_rate_study", "run_bench", "run_diversify", "search_space", "summarize_study",
]
