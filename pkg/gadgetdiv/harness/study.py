"""Parameter studies: LNS relax rate against random search, and the optimality-gap sweep."""
import logging
from dataclasses import replace
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from gadgetdiv.analysis.gadgets import BUCKETS
from gadgetdiv.errors import ConfigError
from gadgetdiv.harness.config import HarnessConfig
from gadgetdiv.harness.report import RunReport
from gadgetdiv.harness.runner import run_diversify
from gadgetdiv.ir.function import Function
from gadgetdiv.ir.isa import IsaTable
from gadgetdiv.models.constraint_model import build_model
from gadgetdiv.models.solution import OptimizationResult
from gadgetdiv.solver.search import optimize

logger = logging.getLogger(__name__)

LNS = "lns"
RS = "rs"
TIE = "tie"


def improvement(a: float, b: float) -> Dict[str, object]:
    """Larger-over-smaller ratio of ``a`` (LNS) and ``b`` (RS) and which side is larger.

    The ratio is NaN when the smaller side is zero or either side is undefined.
    """
    if np.isnan(a) or np.isnan(b):
        return {"ratio": np.nan, "favors": ""}
    if a == b:
        return {"ratio": 1.0, "favors": TIE}
    hi, lo = max(a, b), min(a, b)
    ratio = hi / lo if lo > 0 else np.nan
    return {"ratio": ratio, "favors": LNS if a > b else RS}


def _optimum(fn: Function, isa: IsaTable, cfg: HarnessConfig) -> OptimizationResult:
    return optimize(build_model(fn, isa), cfg.search_params())


def _run(fn: Function, isa: IsaTable, cfg: HarnessConfig, optimum: OptimizationResult) -> RunReport:
    return run_diversify(fn, isa, cfg, optimum=optimum, write=False).report


def relax_rate_study(fn: Function, isa: IsaTable, rates: Sequence[float], cfg: HarnessConfig,
                     seeds: Sequence[int] = (0,)) -> pd.DataFrame:
    """LNS at each relax rate against RS with the same k and time limit.

    One row per (rate, seed) with ``p_delta`` and ``p_t`` as larger-over-smaller
    ratios, the favored side of each, and ``lns_over_rs`` (d_LNS / d_RS).
    Rows where either side has fewer than two variants are marked incomparable.
    """
    for rate in rates:
        if not 0.0 <= rate <= 1.0:
            raise ConfigError(f"relax rate must be in [0, 1], got {rate}")
    optimum = _optimum(fn, isa, cfg)
    rows = []
    for seed in seeds:
        baseline = _run(fn, isa, replace(cfg, algo=RS, seed=seed), optimum)
        for rate in rates:
            lns = _run(fn, isa, replace(cfg, algo=LNS, seed=seed, relax_rate=rate), optimum)
            comparable = lns.num >= 2 and baseline.num >= 2
            delta = improvement(lns.d, baseline.d) if comparable else improvement(np.nan, np.nan)
            timing = improvement(lns.t, baseline.t) if comparable else improvement(np.nan, np.nan)
            if not comparable:
                logger.warning(f"{fn.name}: rate {rate} seed {seed} is incomparable "
                               f"(lns {lns.num}, rs {baseline.num} variants)")
            rows.append({
                "rate": rate,
                "seed": seed,
                "d_lns": lns.d,
                "d_rs": baseline.d,
                "t_lns": lns.t,
                "t_rs": baseline.t,
                "num_lns": lns.num,
                "num_rs": baseline.num,
                "p_delta": delta["ratio"],
                "p_delta_favors": delta["favors"],
                "p_t": timing["ratio"],
                "p_t_favors": timing["favors"],
                "lns_over_rs": lns.d / baseline.d if comparable and baseline.d > 0 else np.nan,
                "comparable": comparable,
            })
    return pd.DataFrame(rows)


def summarize_study(study: pd.DataFrame) -> pd.DataFrame:
    """Median over seeds per rate, comparable rows only."""
    usable = study[study["comparable"]]
    summary = usable.groupby("rate")[["lns_over_rs", "p_delta", "p_t", "d_lns", "d_rs"]].median()
    summary["seeds"] = usable.groupby("rate").size()
    return summary.reset_index()


def inversions(values: Sequence[float]) -> int:
    """Adjacent decreases in a sequence (NaNs ignored)."""
    clean = np.asarray([v for v in values if not np.isnan(v)], dtype=float)
    return int(np.count_nonzero(np.diff(clean) < 0))


def gap_sweep(fn: Function, isa: IsaTable, gaps: Sequence[float], cfg: HarnessConfig,
              optimum: Optional[OptimizationResult] = None) -> pd.DataFrame:
    """One run per optimality gap: pairwise distance, variant count and survival histogram."""
    optimum = optimum or _optimum(fn, isa, cfg)
    rows = []
    for gap in gaps:
        report = _run(fn, isa, replace(cfg, gap=gap), optimum)
        row = {"bench": fn.name, "algo": report.algo, "distance": report.distance, "seed": report.seed, "gap": gap,
               "bound": report.bound, "d": report.d, "t": report.t, "num": report.num,
               "reason": report.reason}
        row.update({name: report.histogram.get(name, 0) for name in BUCKETS})
        pairs = sum(report.histogram.get(name, 0) for name in BUCKETS)
        row["zero_share"] = report.histogram.get(BUCKETS[0], 0) / pairs if pairs else np.nan
        row["mean_gadgets"] = report.mean_gadgets
        rows.append(row)
        logger.info(f"{fn.name}: gap {gap} gave {report.num} variants, d={report.d}")
    return pd.DataFrame(rows)
