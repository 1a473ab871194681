"""Search state: bitset domains copied on branching."""
import math
from typing import Dict, Iterator, List, Optional


def mask_of(values) -> int:
    mask = 0
    for v in values:
        mask |= 1 << v
    return mask


def range_mask(lo: int, hi: int) -> int:
    """Bitset of the closed interval [lo, hi]."""
    if hi < lo:
        return 0
    return ((1 << (hi - lo + 1)) - 1) << lo


def values_of(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Space:
    """Domains of all model variables plus the active cost ceiling."""

    __slots__ = ("doms", "ceiling", "changed")

    def __init__(self, doms: List[int], ceiling: float = math.inf):
        self.doms = doms
        self.ceiling = ceiling
        self.changed: List[int] = []

    def copy(self) -> "Space":
        return Space(list(self.doms), self.ceiling)

    def is_fixed(self, v: int) -> bool:
        d = self.doms[v]
        return d != 0 and d & (d - 1) == 0

    def value(self, v: int) -> int:
        return self.doms[v].bit_length() - 1

    def lb(self, v: int) -> int:
        d = self.doms[v]
        return (d & -d).bit_length() - 1

    def ub(self, v: int) -> int:
        return self.doms[v].bit_length() - 1

    def size(self, v: int) -> int:
        return self.doms[v].bit_count()

    def contains(self, v: int, value: int) -> bool:
        return value >= 0 and (self.doms[v] >> value) & 1 == 1

    def values(self, v: int) -> List[int]:
        return list(values_of(self.doms[v]))

    def restrict(self, v: int, mask: int) -> bool:
        """Intersect a domain with ``mask``; False when it becomes empty."""
        old = self.doms[v]
        new = old & mask
        if new == old:
            return True
        self.doms[v] = new
        if new == 0:
            return False
        self.changed.append(v)
        return True

    def restrict_min(self, v: int, lo: int) -> bool:
        if lo <= 0:
            return True
        return self.restrict(v, ~((1 << lo) - 1))

    def restrict_max(self, v: int, hi: int) -> bool:
        if hi < 0:
            return self.restrict(v, 0)
        return self.restrict(v, (1 << (hi + 1)) - 1)

    def assign(self, v: int, value: int) -> bool:
        if value < 0:
            return self.restrict(v, 0)
        return self.restrict(v, 1 << value)

    def remove(self, v: int, value: int) -> bool:
        if value < 0:
            return True
        return self.restrict(v, ~(1 << value))

    def all_fixed(self, variables) -> bool:
        return all(self.is_fixed(v) for v in variables)

    def assignment(self) -> Optional[List[int]]:
        if not all(self.is_fixed(v) for v in range(len(self.doms))):
            return None
        return [self.value(v) for v in range(len(self.doms))]

    def fixed_values(self, variables=None) -> Dict[int, int]:
        """Values of the fixed variables among ``variables`` (all by default)."""
        candidates = range(len(self.doms)) if variables is None else variables
        return {v: self.value(v) for v in candidates if self.is_fixed(v)}
