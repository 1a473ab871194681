"""Command-line interface: optimize, diversify, gadgets, srate, bench, combine, report, study."""
import argparse
import json
import logging
import os
import sys
from dataclasses import fields
from pathlib import Path
from typing import Callable, Optional, Sequence

import pandas as pd

from gadgetdiv.analysis.gadgets import histogram_from_pairs, scan_gadgets, srate, srate_pairs
from gadgetdiv.errors import ConfigError, GadgetDivError
from gadgetdiv.harness.combine import combine_program, program_srate_sample
from gadgetdiv.harness.config import SHUFFLES, HarnessConfig, load_config
from gadgetdiv.harness.report import cli_report
from gadgetdiv.harness.runner import load_run, run_bench, run_diversify
from gadgetdiv.harness.study import gap_sweep, relax_rate_study, summarize_study
from gadgetdiv.harness.suite import BenchmarkSuite, resolve_function
from gadgetdiv.ir.assembly import linearize, parse_listing
from gadgetdiv.ir.isa import default_isa
from gadgetdiv.models.constraint_model import build_model
from gadgetdiv.solver.search import optimize

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
_CONFIG_KEYS = {f.name for f in fields(HarnessConfig)} | {"no_timing"}


def configure_logging(level: Optional[str] = None) -> None:
    level = (level or os.environ.get("GADGETDIV_LOG_LEVEL", "INFO")).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT, stream=sys.stdout)
    logging.getLogger().setLevel(getattr(logging, level, logging.INFO))


def _csv_list(kind: Callable):
    def parse(text: str):
        try:
            return [kind(part.strip()) for part in text.split(",") if part.strip()]
        except ValueError as e:
            raise argparse.ArgumentTypeError(f"bad list {text!r}") from e
    return parse


def _config_parent() -> argparse.ArgumentParser:
    """Flags shared by every subcommand; absent flags leave config-file values alone."""
    parent = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    parent.add_argument("--config", type=Path, help="flat key = value configuration file")
    parent.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], type=str.upper)
    parent.add_argument("--algo", choices=["lns", "dlns", "rs", "maxdiv"])
    parent.add_argument("--distance", choices=["hd", "ld", "gd"])
    parent.add_argument("--nr", type=int, help="GD register window (instructions before a branch)")
    parent.add_argument("--nc", type=int, help="GD schedule window (cycles before a branch)")
    parent.add_argument("--gap", type=float, help="optimality gap p")
    parent.add_argument("--h", type=int, help="minimum pairwise distance")
    parent.add_argument("--k", type=int, help="number of variants")
    parent.add_argument("--seed", type=int)
    parent.add_argument("--relax-rate", type=float)
    parent.add_argument("--fail-limit", type=int)
    parent.add_argument("--time-limit", type=float, help="seconds")
    parent.add_argument("--base-addr", type=str, help="hex or decimal base address")
    parent.add_argument("--window", type=int, help="gadget length in instructions")
    parent.add_argument("--shuffle", choices=SHUFFLES)
    parent.add_argument("--out", type=str, help="output directory")
    parent.add_argument("--global-relax-rate", type=float)
    parent.add_argument("--locals-per-block", type=int)
    parent.add_argument("--workers", type=int, help="threads for per-block DLNS searches")
    parent.add_argument("--no-timing", action="store_true", help="write t = 0 for byte-stable reports")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parent = _config_parent()
    parser = argparse.ArgumentParser(prog="gadgetdiv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", parents=[parent], help="optimal variant of one function")
    p.add_argument("function", help="benchmark id or IR file")
    p.set_defaults(handler=cli_optimize)

    p = sub.add_parser("diversify", parents=[parent], help="generate variants of one function")
    p.add_argument("function", help="benchmark id or IR file")
    p.set_defaults(handler=cli_diversify)

    p = sub.add_parser("gadgets", parents=[parent], help="scan a listing or a run directory")
    p.add_argument("path", type=Path)
    p.set_defaults(handler=cli_gadgets)

    p = sub.add_parser("srate", parents=[parent], help="survival rate of two listings, or of a run")
    p.add_argument("paths", type=Path, nargs="+", help="RUN_DIR, or FIRST.s SECOND.s")
    p.set_defaults(handler=cli_srate)

    p = sub.add_parser("bench", parents=[parent], help="run the bundled suite")
    p.add_argument("--bench", type=_csv_list(str), default=None, help="benchmark ids")
    p.add_argument("--scale", type=_csv_list(str), default=None, help="toy,small,medium,large")
    p.add_argument("--algos", type=_csv_list(str), default=None, help="defaults to --algo")
    p.add_argument("--seeds", type=_csv_list(int), default=None, help="defaults to --seed")
    p.add_argument("--gaps", type=_csv_list(float), default=None, help="optimality-gap sweep")
    p.add_argument("--jobs", type=int, default=1, help="benchmark cells run in parallel")
    p.set_defaults(handler=cli_bench)

    p = sub.add_parser("combine", parents=[parent], help="whole program from per-function runs")
    p.add_argument("runs", type=Path, nargs="+", help="run directories, one per function")
    p.add_argument("--samples", type=int, default=0, help="program pairs for the srate sample")
    p.set_defaults(handler=cli_combine)

    p = sub.add_parser("report", parents=[parent], help="distance and survival tables")
    p.add_argument("paths", type=Path, nargs="+", help="run directories or report.csv files")
    p.set_defaults(handler=cli_report_command)

    p = sub.add_parser("study", parents=[parent], help="LNS relax rate against random search")
    p.add_argument("function", help="benchmark id or IR file")
    p.add_argument("--rates", type=_csv_list(float), default=[0.2, 0.4, 0.6, 0.8])
    p.add_argument("--seeds", type=_csv_list(int), default=[0, 1, 2, 3, 4])
    p.set_defaults(handler=cli_study)
    return parser


def config_from_args(args: argparse.Namespace) -> HarnessConfig:
    overrides = {k: v for k, v in vars(args).items() if k in _CONFIG_KEYS}
    return load_config(getattr(args, "config", None), overrides)


def cli_optimize(args: argparse.Namespace, cfg: HarnessConfig) -> int:
    isa = default_isa()
    fn = resolve_function(args.function, isa)
    result = optimize(build_model(fn, isa), cfg.search_params())
    print(f"# {fn.name}: cost {result.cost}{'' if result.proven else ' (not proven)'}")
    print(linearize(fn, result.solution, isa, cfg.base_addr).to_text(), end="")
    return 0


def cli_diversify(args: argparse.Namespace, cfg: HarnessConfig) -> int:
    """Optimize and diversify one function, writing its run directory."""
    isa = default_isa()
    fn = resolve_function(args.function, isa)
    bench = Path(args.function).stem if args.function.endswith(".ir") else args.function
    result = run_diversify(fn, isa, cfg, bench)
    report = result.report
    print(f"{report.bench} {report.algo}: num={report.num} d={report.d} t={report.t} "
          f"reason={report.reason} -> {result.run_dir}")
    return 0


def cli_gadgets(args: argparse.Namespace, cfg: HarnessConfig) -> int:
    isa = default_isa()
    if args.path.is_dir():
        run = load_run(args.path, isa)
        pairs = srate_pairs(run.listings, isa, cfg.window)
        pairs.to_csv(args.path / "srate_pairs.csv", index=False)
        counts = [len(scan_gadgets(listing, isa, cfg.window)) for listing in run.listings]
        histogram = histogram_from_pairs(pairs, len(run.listings))
        print(f"{len(run.listings)} variants, gadgets per variant {counts}")
        print(json.dumps(histogram.to_row()))
        return 0
    listing = parse_listing(args.path.read_text())
    gadgets = scan_gadgets(listing, isa, cfg.window)
    for gadget in gadgets:
        print(gadget)
    print(f"# {len(gadgets)} gadgets")
    return 0


def cli_srate(args: argparse.Namespace, cfg: HarnessConfig) -> int:
    isa = default_isa()
    if len(args.paths) == 1 and args.paths[0].is_dir():
        return cli_gadgets(argparse.Namespace(path=args.paths[0]), cfg)
    if len(args.paths) != 2:
        raise ConfigError("srate takes one run directory or two listings")
    first, second = (parse_listing(p.read_text()) for p in args.paths)
    rate = srate(scan_gadgets(first, isa, cfg.window), second, isa, cfg.window)
    print("undefined" if rate is None else f"{rate:.6f}")
    return 0


def cli_bench(args: argparse.Namespace, cfg: HarnessConfig) -> int:
    isa = default_isa()
    suite = BenchmarkSuite.load().filter(scales=args.scale, ids=args.bench)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.gaps:
        frames = [gap_sweep(bench.load(isa), isa, args.gaps, cfg) for bench in suite]
        table = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
        table.to_csv(out / "gap_sweep.csv", index=False)
        logger.info(f"Wrote {out / 'gap_sweep.csv'}")
        return 0
    table = run_bench(list(suite), cfg, args.algos or [cfg.algo], args.seeds or [cfg.seed], args.jobs)
    table.to_csv(out / "bench_report.csv", index=False)
    logger.info(f"Wrote {len(table)} rows to {out / 'bench_report.csv'}")
    return 0


def cli_combine(args: argparse.Namespace, cfg: HarnessConfig) -> int:
    isa = default_isa()
    runs = [load_run(path, isa) for path in args.runs]
    functions = [(run.function, run.variant_set()) for run in runs]
    program = combine_program(functions, isa, cfg.shuffle, cfg.seed, cfg.base_addr)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"program_{cfg.shuffle}.s").write_text(program.listing.to_text())
    manifest = program.manifest(functions)
    if args.samples > 0:
        sample = program_srate_sample(functions, isa, cfg.shuffle, args.samples, cfg.seed,
                                      cfg.base_addr, cfg.window)
        sample.to_csv(out / f"program_srate_{cfg.shuffle}.csv", index=False)
        manifest["mean_srate"] = float(sample["srate"].mean())
    (out / f"combine_{cfg.shuffle}.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(json.dumps(manifest, sort_keys=True))
    return 0


def cli_report_command(args: argparse.Namespace, cfg: HarnessConfig) -> int:
    written = cli_report(args.paths, Path(cfg.out))
    for path in written.values():
        print(path)
    return 0


def cli_study(args: argparse.Namespace, cfg: HarnessConfig) -> int:
    isa = default_isa()
    fn = resolve_function(args.function, isa)
    study = relax_rate_study(fn, isa, args.rates, cfg, args.seeds)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    study.to_csv(out / f"study_{fn.name}.csv", index=False)
    summary = summarize_study(study)
    summary.to_csv(out / f"study_{fn.name}_summary.csv", index=False)
    print(summary.to_string(index=False))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "log_level", None):
        logging.getLogger().setLevel(args.log_level)
    try:
        cfg = config_from_args(args)
        return args.handler(args, cfg)
    except GadgetDivError as e:
        logger.error(f"{args.command} failed: {str(e)}")
        return 1


def run() -> None:
    """Console-script entry point."""
    configure_logging()
    sys.exit(main())
