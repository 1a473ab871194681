"""End-to-end trend checks over the bundled suite.

These take minutes; run them with ``pytest -m slow``.
"""
import statistics
from dataclasses import replace

import numpy as np
import pytest

from gadgetdiv.diversify import validate_variant_set
from gadgetdiv.harness import HarnessConfig, gap_sweep, relax_rate_study, run_diversify, summarize_study
from gadgetdiv.harness.combine import mean_program_srate
from gadgetdiv.harness.study import inversions

pytestmark = pytest.mark.slow

ALGOS = ["lns", "dlns", "rs", "maxdiv"]
INVARIANT_FUNCTIONS = ["pair", "chain3", "trio", "twoblock", "factorial"]
SEEDS = [0, 1, 2, 3, 4]


def mid_size(suite, isa):
    return [b.id for b in suite if len(b.load(isa)) >= 20]


@pytest.mark.parametrize("algo", ALGOS)
@pytest.mark.parametrize("distance", ["hd", "gd"])
def test_every_variant_is_valid(bench, isa, tmp_path, algo, distance):
    """Gap bound, validity and pairwise distance of every emitted variant set."""
    for bench_id in INVARIANT_FUNCTIONS:
        fn = bench(bench_id)
        cfg = HarnessConfig(algo=algo, distance=distance, nr=0, nc=8, k=20, time_limit=10.0,
                            out=str(tmp_path), timing=False)
        variants = run_diversify(fn, isa, cfg, write=False).variants
        dcfg = cfg.diversify_config()
        assert validate_variant_set(fn, isa, variants, dcfg.spec, check_distance=algo != "rs") == []


def _mean_d(fn, isa, cfg, algo):
    return statistics.mean(run_diversify(fn, isa, replace(cfg, algo=algo, seed=seed), write=False).report.d
                           for seed in SEEDS)


def test_lns_beats_random_search(suite, bench, isa, tmp_path):
    cfg = HarnessConfig(gap=0.10, distance="hd", k=50, time_limit=20.0, out=str(tmp_path), timing=False)
    ratios = []
    for bench_id in mid_size(suite, isa):
        fn = bench(bench_id)
        d_lns, d_rs = _mean_d(fn, isa, cfg, "lns"), _mean_d(fn, isa, cfg, "rs")
        assert d_lns >= d_rs, bench_id
        ratios.append(d_lns / d_rs)
    assert sum(r >= 2.0 for r in ratios) >= len(ratios) / 2


def test_dlns_between_random_search_and_lns(suite, bench, isa, tmp_path):
    cfg = HarnessConfig(gap=0.10, distance="hd", k=50, time_limit=20.0, out=str(tmp_path), timing=False)
    rows = []
    for bench_id in mid_size(suite, isa):
        fn = bench(bench_id)
        rows.append(tuple(_mean_d(fn, isa, cfg, algo) for algo in ("rs", "dlns", "lns")))
    violations = sum(1 for rs, dlns, lns in rows if not rs <= dlns <= lns)
    assert violations <= 1
    rs, dlns, lns = (statistics.median(column) for column in zip(*rows))
    assert rs <= dlns <= lns


def test_gadget_distance_empties_the_survival_histogram(bench, isa, tmp_path):
    cfg = HarnessConfig(algo="lns", distance="gd", nr=0, nc=8, k=50, time_limit=30.0,
                        out=str(tmp_path), timing=False)
    sweep = gap_sweep(bench("ulaw2alaw"), isa, [0.0, 0.05, 0.10], cfg).set_index("gap")
    buckets = ["=0", "<=10", "<=40", "<=100"]
    for gap in (0.05, 0.10):
        counts = sweep.loc[gap, buckets].to_numpy(dtype=int)
        assert buckets[int(np.argmax(counts))] == "=0"
    assert sweep.loc[0.10, "zero_share"] >= sweep.loc[0.0, "zero_share"]


def test_function_shuffling_lowers_program_survival(bench, isa, tmp_path):
    cfg = HarnessConfig(algo="lns", distance="hd", k=50, time_limit=30.0, out=str(tmp_path), timing=False)
    functions = []
    for bench_id in ("factorial", "sum_loop", "ulaw2alaw"):
        fn = bench(bench_id)
        functions.append((fn, run_diversify(fn, isa, cfg, write=False).variants))
    nfs = mean_program_srate(functions, isa, "nfs", samples=100, seed=0)
    fs = mean_program_srate(functions, isa, "fs", samples=100, seed=0)
    assert fs <= nfs
    assert nfs < 0.05 and fs < 0.05


def test_relax_rate_trend(bench, isa, tmp_path):
    cfg = HarnessConfig(distance="hd", k=50, time_limit=20.0, out=str(tmp_path), timing=False)
    study = relax_rate_study(bench("crc_step"), isa, [0.2, 0.4, 0.6, 0.8], cfg, seeds=SEEDS)
    summary = summarize_study(study).sort_values("rate")
    assert inversions(list(summary["lns_over_rs"])) <= 1


def test_reports_are_reproducible(bench, isa, tmp_path):
    fn = bench("ulaw2alaw")
    reports = []
    for name in ("a", "b"):
        cfg = HarnessConfig(algo="lns", distance="gd", k=20, seed=3, time_limit=60.0,
                            out=str(tmp_path / name), timing=False)
        run_dir = run_diversify(fn, isa, cfg).run_dir
        reports.append((run_dir / "report.csv").read_bytes())
    assert reports[0] == reports[1]
