"""Diversification runs and their on-disk layout.

A run of one algorithm on one benchmark writes, under ``OUT/<bench>/<algo>_<distance>_p<gap>/``
(for example ``runs/factorial/lns_gd0-8_p0.1``)::

    function.ir        the input function
    variant_NNN.s      one listing per variant, the optimum is variant_000
    variants.jsonl     {variant, cost, cycles, impls, regs} per line
    report.csv         one RunReport row
    trace.csv          variant, seconds, cost
"""
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import pandas as pd

from gadgetdiv.diversify import Algorithm, VariantSet, diversify, validate_variant_set
from gadgetdiv.errors import ReportError
from gadgetdiv.harness.config import HarnessConfig
from gadgetdiv.harness.report import REPORT_FILE, RunReport, build_report
from gadgetdiv.harness.suite import Benchmark
from gadgetdiv.ir.assembly import AssemblyListing, linearize, parse_listing
from gadgetdiv.ir.function import Function
from gadgetdiv.ir.isa import IsaTable, default_isa
from gadgetdiv.ir.parser import parse_function, serialize_function
from gadgetdiv.models.solution import OptimizationResult, SolutionAssignment
from gadgetdiv.models.validator import check_solution

logger = logging.getLogger(__name__)

FUNCTION_FILE = "function.ir"
MANIFEST_FILE = "variants.jsonl"
TRACE_FILE = "trace.csv"


@dataclass
class RunResult:
    variants: VariantSet
    report: RunReport
    run_dir: Path


def variant_file(index: int) -> str:
    return f"variant_{index:03d}.s"


def run_directory(out: Path, bench: str, name: str) -> Path:
    return Path(out) / bench / name


def write_variants(run_dir: Path, fn: Function, isa: IsaTable, variants: VariantSet,
                   base: int = 0, timing: bool = True) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)
    for stale in run_dir.glob("variant_*.s"):
        stale.unlink()
    (run_dir / FUNCTION_FILE).write_text(serialize_function(fn, isa))
    with open(run_dir / MANIFEST_FILE, "w") as manifest:
        for k, sol in enumerate(variants.solutions):
            (run_dir / variant_file(k)).write_text(linearize(fn, sol, isa, base).to_text())
            manifest.write(json.dumps(sol.to_record(k)) + "\n")
    trace = pd.DataFrame({
        "variant": range(len(variants)),
        "seconds": variants.timestamps if timing else [0.0] * len(variants),
        "cost": [s.cost for s in variants.solutions],
    })
    trace.to_csv(run_dir / TRACE_FILE, index=False)


def run_diversify(fn: Function, isa: IsaTable, cfg: HarnessConfig, bench: Optional[str] = None,
                  optimum: Optional[OptimizationResult] = None, write: bool = True) -> RunResult:
    """Optimize, diversify, write the run directory and its report."""
    bench = bench or fn.name
    run_dir = run_directory(Path(cfg.out), bench, cfg.run_name())
    try:
        dcfg = cfg.diversify_config()
        variants = diversify(fn, isa, dcfg, optimum)
        # random search only deduplicates
        problems = validate_variant_set(fn, isa, variants, dcfg.spec,
                                        check_distance=dcfg.algorithm is not Algorithm.RS)
        for problem in problems:
            logger.warning(f"{bench}: {problem}")
        report = build_report(fn, isa, variants, cfg, bench, timing=cfg.timing)
        if write:
            write_variants(run_dir, fn, isa, variants, cfg.base_addr, cfg.timing)
            report.write(run_dir)
            logger.info(f"{bench}: wrote {len(variants)} variants to {run_dir}")
    except Exception as e:
        logger.error(f"Diversification of {bench} failed: {str(e)}", exc_info=True)
        raise
    return RunResult(variants, report, run_dir)


@dataclass
class LoadedRun:
    function: Function
    solutions: List[SolutionAssignment]
    listings: List[AssemblyListing]
    report: pd.DataFrame
    run_dir: Path

    def variant_set(self) -> VariantSet:
        row = self.report.iloc[0]
        return VariantSet(self.function.name, str(row["algo"]), int(row["o"]), int(row["bound"]),
                          list(self.solutions), [0.0] * len(self.solutions), str(row["reason"]))


def load_run(run_dir: Path, isa: IsaTable, validate: bool = True) -> LoadedRun:
    """Read a run directory back; listings are re-parsed and, optionally, solutions re-validated."""
    run_dir = Path(run_dir)
    try:
        fn = parse_function((run_dir / FUNCTION_FILE).read_text(), isa)
        with open(run_dir / MANIFEST_FILE) as manifest:
            records = [json.loads(line) for line in manifest if line.strip()]
        report = pd.read_csv(run_dir / REPORT_FILE)
    except (OSError, ValueError) as e:
        raise ReportError(f"incomplete run directory {run_dir}: {str(e)}") from e
    if not records:
        raise ReportError(f"{run_dir / MANIFEST_FILE} lists no variants")
    solutions = [SolutionAssignment.from_record(r) for r in sorted(records, key=lambda r: r["variant"])]
    listings = []
    for k in range(len(solutions)):
        path = run_dir / variant_file(k)
        if not path.exists():
            raise ReportError(f"missing listing {path}")
        listings.append(parse_listing(path.read_text()))
    if validate:
        bound = int(report["bound"].iloc[0])
        for k, sol in enumerate(solutions):
            problems = check_solution(fn, isa, sol, bound)
            if problems:
                raise ReportError(f"{run_dir}: variant {k} is invalid: {problems[0]}")
    return LoadedRun(fn, solutions, listings, report, run_dir)


def _bench_cell(args: Tuple[Benchmark, HarnessConfig]) -> dict:
    bench, cfg = args
    isa = default_isa()
    fn = bench.load(isa)
    return run_diversify(fn, isa, cfg, bench.id).report.to_row()


def run_bench(benchmarks: Sequence[Benchmark], cfg: HarnessConfig, algos: Sequence[str],
              seeds: Sequence[int], jobs: int = 1) -> pd.DataFrame:
    """Every (benchmark, algorithm, seed) cell; cells run in separate processes when ``jobs > 1``."""
    cells = []
    for bench in benchmarks:
        for algo in algos:
            for seed in seeds:
                out = Path(cfg.out) / f"seed_{seed}" if len(seeds) > 1 else Path(cfg.out)
                cells.append((bench, replace(cfg, algo=algo, seed=seed, out=str(out))))
    logger.info(f"Running {len(cells)} cells with {jobs} job(s)")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_bench_cell, cells))
    else:
        rows = [_bench_cell(cell) for cell in cells]
    return pd.DataFrame(rows)
