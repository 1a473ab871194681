"""Run reports and the aggregated distance and survival tables."""
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd

from gadgetdiv.analysis.distances import DistanceKind, DistanceSpec, pairwise_distance
from gadgetdiv.analysis.gadgets import BUCKETS, mean_gadget_count, survival_histogram
from gadgetdiv.analysis.transformations import mean_transformations
from gadgetdiv.diversify.base_diversifier import VariantSet
from gadgetdiv.errors import ReportError
from gadgetdiv.ir.assembly import linearize
from gadgetdiv.ir.function import Function
from gadgetdiv.ir.isa import IsaTable

logger = logging.getLogger(__name__)

REPORT_FILE = "report.csv"
DISTANCE_TABLE = "distance_table.csv"
SURVIVAL_TABLE = "survival_table.csv"
_REQUIRED = ("bench", "algo", "distance", "gap", "seed", "d", "t", "num") + BUCKETS
RUN_KEY = ["bench", "algo", "distance", "gap", "seed"]


@dataclass
class RunReport:
    """One diversification run of one benchmark."""
    bench: str
    algo: str
    distance: str
    gap: float
    seed: int
    d: float
    d_hd: float
    d_ld: float
    d_gd: float
    t: float
    num: int
    reason: str
    o: int
    bound: int
    proven: bool
    histogram: Dict[str, int] = field(default_factory=dict)
    mean_gadgets: float = 0.0
    transformations: Dict[str, float] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)

    def to_row(self) -> Dict[str, Any]:
        row = asdict(self)
        histogram = row.pop("histogram")
        transformations = row.pop("transformations")
        config = row.pop("config")
        for name in BUCKETS:
            row[name] = histogram.get(name, 0)
        row.update(transformations)
        for key, value in config.items():
            row.setdefault(key, value)
        return row

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([self.to_row()])

    def write(self, run_dir: Path) -> Path:
        path = Path(run_dir) / REPORT_FILE
        self.to_frame().to_csv(path, index=False)
        return path


def _pairwise(solutions, spec: DistanceSpec, fn: Function) -> float:
    if len(solutions) < 2:
        return float("nan")
    return round(pairwise_distance(solutions, spec, fn), 6)


def build_report(fn: Function, isa: IsaTable, variants: VariantSet, cfg, bench: str,
                 timing: bool = True) -> RunReport:
    """Distances under all three measures, survival histogram, gadget counts and mean transformation
    counts against the optimum of a variant set.

    ``cfg`` is the harness configuration echoed into the row.
    """
    spec = cfg.distance_spec()
    solutions = variants.solutions
    by_kind = {kind: _pairwise(solutions, DistanceSpec(kind, spec.h, spec.n_r, spec.n_c), fn)
               for kind in DistanceKind}
    histogram = survival_histogram(solutions, fn, isa, cfg.base_addr, cfg.window)
    listings = [linearize(fn, sol, isa, cfg.base_addr) for sol in solutions]
    return RunReport(
        bench=bench,
        algo=variants.algorithm,
        distance=spec.label,
        gap=cfg.gap,
        seed=cfg.seed,
        d=by_kind[spec.kind],
        d_hd=by_kind[DistanceKind.HD],
        d_ld=by_kind[DistanceKind.LD],
        d_gd=by_kind[DistanceKind.GD],
        t=round(variants.elapsed, 3) if timing else 0.0,
        num=len(variants),
        reason=variants.reason,
        o=variants.o,
        bound=variants.bound,
        proven=variants.proven,
        histogram=histogram.to_row(),
        mean_gadgets=round(mean_gadget_count(listings, isa, cfg.window), 3),
        transformations=mean_transformations(fn, solutions),
        config=cfg.echo(),
    )


def collect_reports(paths: Sequence[Path]) -> pd.DataFrame:
    """All ``report.csv`` files found in or under ``paths``, concatenated."""
    files: List[Path] = []
    for path in map(Path, paths):
        if path.is_file():
            files.append(path)
        elif path.is_dir():
            files.extend(sorted(path.rglob(REPORT_FILE)))
        else:
            raise ReportError(f"no such run directory or report: {path}")
    if not files:
        raise ReportError(f"no {REPORT_FILE} under {', '.join(map(str, paths))}")
    frames = []
    for f in files:
        try:
            frame = pd.read_csv(f)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise ReportError(f"corrupt report {f}: {str(e)}") from e
        missing = [c for c in _REQUIRED if c not in frame.columns]
        if missing or frame.empty:
            raise ReportError(f"corrupt report {f}: missing {missing or 'rows'}")
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def _check_unique(reports: pd.DataFrame) -> None:
    duplicated = reports.duplicated(RUN_KEY, keep=False)
    if duplicated.any():
        runs = reports.loc[duplicated, RUN_KEY].drop_duplicates().to_dict("records")
        raise ReportError(f"more than one report for the same run: {runs}")


def distance_table(reports: pd.DataFrame) -> pd.DataFrame:
    """One row per (benchmark, distance, gap, seed), one ``{algo}_d/_t/_num`` column group per algorithm."""
    _check_unique(reports)
    index = ["bench", "distance", "gap", "seed"]
    wide = reports.pivot(index=index, columns="algo", values=["d", "t", "num"])
    algos = sorted(reports["algo"].unique())
    table = pd.DataFrame(index=wide.index)
    for algo in algos:
        for metric in ("d", "t", "num"):
            table[f"{algo}_{metric}"] = wide[(metric, algo)] if (metric, algo) in wide.columns else np.nan
    table = table.reset_index().rename(columns={"bench": "id"})
    return table.sort_values(["id", "distance", "gap", "seed"]).reset_index(drop=True)


def survival_table(reports: pd.DataFrame) -> pd.DataFrame:
    _check_unique(reports)
    table = reports[[*RUN_KEY, *BUCKETS, "num"]].rename(columns={"bench": "id"})
    return table.sort_values(["id", "algo", "distance", "gap", "seed"]).reset_index(drop=True)


def cli_report(paths: Sequence[Path], out: Path) -> Dict[str, Path]:
    """Write ``distance_table.csv`` and ``survival_table.csv`` from finished runs."""
    try:
        reports = collect_reports(paths)
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        written = {
            "distance": out / DISTANCE_TABLE,
            "survival": out / SURVIVAL_TABLE,
        }
        distance_table(reports).to_csv(written["distance"], index=False)
        survival_table(reports).to_csv(written["survival"], index=False)
    except Exception as e:
        logger.error(f"Report generation failed: {str(e)}", exc_info=True)
        raise
    logger.info(f"Wrote {len(reports)} runs to {written['distance']} and {written['survival']}")
    return written
