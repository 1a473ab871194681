"""JOP gadget scanning, survival rates and survival histograms."""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from gadgetdiv.errors import ConfigError
from gadgetdiv.ir.assembly import AssemblyLine, AssemblyListing, linearize
from gadgetdiv.ir.function import Function
from gadgetdiv.ir.isa import IsaTable

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 8
BUCKETS = ("=0", "<=10", "<=40", "<=100")

Body = Tuple[Tuple[str, Tuple[str, ...]], ...]


@dataclass(frozen=True)
class Gadget:
    start: int
    end: int
    body: Body

    @property
    def key(self) -> Tuple[int, int, Body]:
        return (self.start, self.end, self.body)

    def __str__(self) -> str:
        text = " ; ".join(f"{m} {', '.join(ops)}".strip() for m, ops in self.body)
        return f"{self.start:08x}-{self.end:08x}: {text}"


@dataclass(frozen=True)
class GadgetSet:
    gadgets: Tuple[Gadget, ...]
    window: int = DEFAULT_WINDOW

    @property
    def keys(self) -> FrozenSet[Tuple[int, int, Body]]:
        return frozenset(g.key for g in self.gadgets)

    def __len__(self) -> int:
        return len(self.gadgets)

    def __iter__(self):
        return iter(self.gadgets)


def normalize(lines: Iterable[AssemblyLine], isa: IsaTable) -> Body:
    """Mnemonics and operand tokens with nop lines dropped."""
    return tuple((line.mnemonic, tuple(line.operands)) for line in lines
                 if not isa.classify(line.mnemonic).nop)


def scan_gadgets(listing: AssemblyListing, isa: IsaTable, window: int = DEFAULT_WINDOW) -> GadgetSet:
    """Every suffix of up to ``window`` lines ending in an indirect branch.

    A gadget never contains another branch line, so suffixes stop growing
    at the first branch met while walking backwards.
    """
    if window < 1:
        raise ConfigError(f"gadget window must be >= 1, got {window}")
    lines = listing.lines
    found: List[Gadget] = []
    for end, line in enumerate(lines):
        if not isa.classify(line.mnemonic).indirect:
            continue
        for length in range(1, window + 1):
            start = end - length + 1
            if start < 0:
                break
            if length > 1 and isa.classify(lines[start].mnemonic).is_branch:
                break
            found.append(Gadget(lines[start].address, line.address,
                                normalize(lines[start:end + 1], isa)))
    return GadgetSet(tuple(found), window)


def srate(gadgets: GadgetSet, listing: AssemblyListing, isa: IsaTable,
          window: Optional[int] = None) -> Optional[float]:
    """Fraction of ``gadgets`` found at the same addresses with the same body in ``listing``.

    Returns None when ``gadgets`` is empty (the rate is undefined).
    """
    if len(gadgets) == 0:
        return None
    other = scan_gadgets(listing, isa, window if window is not None else gadgets.window)
    return _survival(gadgets, other)


def _survival(gadgets: GadgetSet, other: GadgetSet) -> Optional[float]:
    if len(gadgets) == 0:
        return None
    keys = other.keys
    survived = sum(1 for g in gadgets if g.key in keys)
    return survived / len(gadgets)


@dataclass(frozen=True)
class SurvivalHistogram:
    """Ordered variant pairs per srate bucket, plus the number of variants."""
    zero: int = 0
    le10: int = 0
    le40: int = 0
    le100: int = 0
    num: int = 0

    @property
    def pairs(self) -> int:
        return self.zero + self.le10 + self.le40 + self.le100

    @property
    def counts(self) -> Tuple[int, int, int, int]:
        return (self.zero, self.le10, self.le40, self.le100)

    def shares(self) -> Dict[str, float]:
        """Bucket fractions (all zero for an empty histogram)."""
        total = self.pairs
        return {name: (count / total if total else 0.0) for name, count in zip(BUCKETS, self.counts)}

    @property
    def mode(self) -> Optional[str]:
        if self.pairs == 0:
            return None
        return BUCKETS[int(np.argmax(self.counts))]

    def to_row(self) -> Dict[str, int]:
        row = dict(zip(BUCKETS, self.counts))
        row["num"] = self.num
        return row


def bucket_rates(rates: Sequence[float], num: int) -> SurvivalHistogram:
    """Histogram over =0, (0,10], (10,40] and (40,100] percent."""
    if len(rates) == 0:
        return SurvivalHistogram(num=num)
    # rounding keeps 0.1 * 100 inside the (0,10] bucket
    pct = np.round(np.asarray(rates, dtype=float) * 100.0, 9)
    zero = int(np.count_nonzero(pct == 0))
    positive = pct[pct > 0]
    index = np.searchsorted(np.array([10.0, 40.0]), positive, side="left")
    counts = np.bincount(index, minlength=3)
    return SurvivalHistogram(zero, int(counts[0]), int(counts[1]), int(counts[2]), num)


def gadget_sets(listings: Sequence[AssemblyListing], isa: IsaTable,
                window: int = DEFAULT_WINDOW) -> List[GadgetSet]:
    return [scan_gadgets(listing, isa, window) for listing in listings]


def srate_pairs(listings: Sequence[AssemblyListing], isa: IsaTable,
                window: int = DEFAULT_WINDOW) -> pd.DataFrame:
    """``variant_i, variant_j, srate`` for every ordered pair; srate is NaN when undefined."""
    sets = gadget_sets(listings, isa, window)
    rows = []
    for i, j in itertools.permutations(range(len(listings)), 2):
        rate = _survival(sets[i], sets[j])
        rows.append({"variant_i": i, "variant_j": j, "srate": np.nan if rate is None else rate})
    return pd.DataFrame(rows, columns=["variant_i", "variant_j", "srate"])


def histogram_from_pairs(pairs: pd.DataFrame, num: int) -> SurvivalHistogram:
    return bucket_rates(pairs["srate"].dropna().to_numpy(), num)


def survival_histogram(solutions: Sequence, fn: Function, isa: IsaTable, base: int = 0,
                       window: int = DEFAULT_WINDOW) -> SurvivalHistogram:
    """Bucketed srate over all ordered pairs of distinct variants."""
    listings = [linearize(fn, sol, isa, base) for sol in solutions]
    pairs = srate_pairs(listings, isa, window)
    undefined = int(pairs["srate"].isna().sum())
    if undefined:
        logger.debug(f"{fn.name}: {undefined} pairs without gadgets left out of the histogram")
    return histogram_from_pairs(pairs, len(solutions))


def mean_gadget_count(listings: Sequence[AssemblyListing], isa: IsaTable,
                      window: int = DEFAULT_WINDOW) -> float:
    if not listings:
        return 0.0
    return float(np.mean([len(s) for s in gadget_sets(listings, isa, window)]))
