"""Whole-program assembly from per-function variants, with or without function shuffling."""
import logging
import math
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from gadgetdiv.analysis.gadgets import DEFAULT_WINDOW, scan_gadgets, srate
from gadgetdiv.diversify.base_diversifier import VariantSet
from gadgetdiv.errors import ConfigError
from gadgetdiv.harness.config import SHUFFLES
from gadgetdiv.ir.assembly import AssemblyListing, linearize
from gadgetdiv.ir.function import Function
from gadgetdiv.ir.isa import IsaTable

logger = logging.getLogger(__name__)

NFS = "nfs"
FS = "fs"

FunctionVariants = Tuple[Function, VariantSet]


@dataclass(frozen=True)
class CombinedProgram:
    listing: AssemblyListing
    picks: Tuple[int, ...]
    order: Tuple[int, ...]
    shuffle: str
    search_space: int

    def manifest(self, functions: Sequence[FunctionVariants]) -> Dict[str, object]:
        return {
            "shuffle": self.shuffle,
            "order": [functions[i][0].name for i in self.order],
            "picks": {functions[i][0].name: self.picks[i] for i in range(len(functions))},
            "search_space": str(self.search_space),
            "lines": len(self.listing),
            "base": self.listing.base,
        }


def search_space(counts: Sequence[int], shuffle: str) -> int:
    """Distinct programs: the product of variant counts, times f! with shuffling."""
    total = math.prod(counts)
    return total * math.factorial(len(counts)) if shuffle == FS else total


def combine_program(functions: Sequence[FunctionVariants], isa: IsaTable, shuffle: str = NFS,
                    seed: int = 0, base: int = 0) -> CombinedProgram:
    """Pick one variant per function and lay the functions out contiguously from ``base``.

    NFS keeps the input order; FS applies a seeded permutation first.
    """
    if shuffle not in SHUFFLES:
        raise ConfigError(f"shuffle must be one of {SHUFFLES}, got {shuffle!r}")
    for fn, variants in functions:
        if not variants.solutions:
            raise ConfigError(f"no variants for {fn.name}")
    rng = random.Random(seed)
    picks = tuple(rng.randrange(len(variants)) for _, variants in functions)
    order = list(range(len(functions)))
    if shuffle == FS:
        rng.shuffle(order)
    parts = [linearize(functions[i][0], functions[i][1].solutions[picks[i]], isa) for i in order]
    listing = AssemblyListing.concat(parts, base)
    space = search_space([len(v) for _, v in functions], shuffle)
    return CombinedProgram(listing, picks, tuple(order), shuffle, space)


def program_srate_sample(functions: Sequence[FunctionVariants], isa: IsaTable, shuffle: str,
                         samples: int = 100, seed: int = 0, base: int = 0,
                         window: int = DEFAULT_WINDOW) -> pd.DataFrame:
    """srate between ``samples`` pairs of independently combined programs."""
    rng = random.Random(seed)
    rows: List[Dict[str, object]] = []
    for k in range(samples):
        first = combine_program(functions, isa, shuffle, rng.getrandbits(32), base)
        second = combine_program(functions, isa, shuffle, rng.getrandbits(32), base)
        rate = srate(scan_gadgets(first.listing, isa, window), second.listing, isa, window)
        rows.append({"sample": k, "shuffle": shuffle, "srate": np.nan if rate is None else rate})
    table = pd.DataFrame(rows, columns=["sample", "shuffle", "srate"])
    logger.info(f"{shuffle}: mean program srate {table['srate'].mean():.4f} over {samples} pairs")
    return table


def mean_program_srate(functions: Sequence[FunctionVariants], isa: IsaTable, shuffle: str,
                       samples: int = 100, seed: int = 0, base: int = 0,
                       window: int = DEFAULT_WINDOW) -> Optional[float]:
    table = program_srate_sample(functions, isa, shuffle, samples, seed, base, window)
    rates = table["srate"].dropna()
    return float(rates.mean()) if len(rates) else None
