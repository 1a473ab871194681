"""Propagators of the finite-domain engine.

Each propagator narrows domains of a :class:`Space` and returns False on a
dead end. Propagators hold no search state, so one instance serves every
space and every concurrent search.
"""
from abc import ABC, abstractmethod
from typing import Callable, Optional, Sequence, Tuple

from gadgetdiv.solver.space import Space


class Propagator(ABC):
    name = "propagator"

    def __init__(self, variables: Sequence[int]):
        self.vars: Tuple[int, ...] = tuple(dict.fromkeys(variables))

    @abstractmethod
    def propagate(self, space: Space) -> bool:
        """Narrow domains; return False when a domain becomes empty."""

    def __repr__(self) -> str:
        return f"{type(self).__name__}({len(self.vars)} vars)"


class Precedence(Propagator):
    """``c_dst >= c_src + latency``.

    With an implementation variable the latency is that of the chosen
    alternative once fixed, and the minimum over the remaining ones before.
    """
    name = "precedence"

    def __init__(self, src: int, dst: int, latency: int = 0,
                 impl: Optional[int] = None, latencies: Sequence[int] = ()):
        super().__init__([src, dst] + ([impl] if impl is not None else []))
        self.src = src
        self.dst = dst
        self.latency = latency
        self.impl = impl
        self.latencies = tuple(latencies)

    def propagate(self, space: Space) -> bool:
        if self.impl is None:
            lat = self.latency
        else:
            lat = min(self.latencies[m] for m in space.values(self.impl))
        if not space.restrict_min(self.dst, space.lb(self.src) + lat):
            return False
        if not space.restrict_max(self.src, space.ub(self.dst) - lat):
            return False
        if self.impl is not None and not space.is_fixed(self.impl):
            room = space.ub(self.dst) - space.lb(self.src)
            keep = 0
            for m in space.values(self.impl):
                if self.latencies[m] <= room:
                    keep |= 1 << m
            if not space.restrict(self.impl, keep):
                return False
        return True


class AllDifferent(Propagator):
    """Pairwise distinct values (single issue per block)."""
    name = "all-different"

    def propagate(self, space: Space) -> bool:
        changed = True
        while changed:
            changed = False
            taken = 0
            for v in self.vars:
                if space.is_fixed(v):
                    bit = space.doms[v]
                    if taken & bit:
                        return False
                    taken |= bit
            if not taken:
                break
            for v in self.vars:
                if not space.is_fixed(v):
                    if not space.restrict(v, ~taken):
                        return False
                    if space.is_fixed(v):
                        changed = True
        union = 0
        for v in self.vars:
            union |= space.doms[v]
        return union.bit_count() >= len(self.vars)


class NotEqual(Propagator):
    name = "not-equal"

    def __init__(self, x: int, y: int):
        super().__init__([x, y])
        self.x = x
        self.y = y

    def propagate(self, space: Space) -> bool:
        if space.is_fixed(self.x) and not space.remove(self.y, space.value(self.x)):
            return False
        if space.is_fixed(self.y) and not space.remove(self.x, space.value(self.y)):
            return False
        return True


class LiveRangeInterference(Propagator):
    """Two temps of one block whose closed live ranges overlap need distinct registers.

    A temp's live range is [first def cycle, last def-or-use cycle].
    """
    name = "interference"

    def __init__(self, reg_a: int, starts_a: Sequence[int], points_a: Sequence[int],
                 reg_b: int, starts_b: Sequence[int], points_b: Sequence[int]):
        super().__init__([reg_a, reg_b, *starts_a, *points_a, *starts_b, *points_b])
        self.reg_a, self.reg_b = reg_a, reg_b
        self.starts_a, self.points_a = tuple(starts_a), tuple(points_a)
        self.starts_b, self.points_b = tuple(starts_b), tuple(points_b)

    @staticmethod
    def _bounds(space: Space, starts, points):
        """Latest possible start and earliest possible end of a live range."""
        return min(space.ub(c) for c in starts), max(space.lb(c) for c in points)

    def propagate(self, space: Space) -> bool:
        a_sub, a_elb = self._bounds(space, self.starts_a, self.points_a)
        b_sub, b_elb = self._bounds(space, self.starts_b, self.points_b)
        if not (a_sub <= b_elb and b_sub <= a_elb):
            # ranges may still separate
            return True
        if space.is_fixed(self.reg_a) and not space.remove(self.reg_b, space.value(self.reg_a)):
            return False
        if space.is_fixed(self.reg_b) and not space.remove(self.reg_a, space.value(self.reg_b)):
            return False
        return True


class ObjectiveCeiling(Propagator):
    """``sum_b freq_b * (c_branch_b + 1) <= space.ceiling``."""
    name = "objective"

    def __init__(self, branch_vars: Sequence[int], freqs: Sequence[int]):
        super().__init__(branch_vars)
        self.branch_vars = tuple(branch_vars)
        self.freqs = tuple(freqs)

    def lower_bound(self, space: Space) -> int:
        return sum(f * (space.lb(v) + 1) for v, f in zip(self.branch_vars, self.freqs))

    def propagate(self, space: Space) -> bool:
        ceiling = space.ceiling
        if ceiling == float("inf"):
            return True
        total = self.lower_bound(space)
        if total > ceiling:
            return False
        for v, f in zip(self.branch_vars, self.freqs):
            others = total - f * (space.lb(v) + 1)
            if not space.restrict_max(v, int((ceiling - others) // f) - 1):
                return False
        return True


class DistanceAtLeast(Propagator):
    """``sum_k weight_k * [x_k != ref_k] >= h``: Hamming and gadget distances."""
    name = "distance"

    def __init__(self, variables: Sequence[int], refs: Sequence[int], weights: Sequence[int], h: int):
        kept = [(v, r, w) for v, r, w in zip(variables, refs, weights) if w > 0]
        super().__init__([v for v, _, _ in kept])
        self.terms = tuple(kept)
        self.h = h

    def max_distance(self, space: Space) -> int:
        return sum(w for v, r, w in self.terms if space.doms[v] & ~(1 << r))

    def propagate(self, space: Space) -> bool:
        possible = self.max_distance(space)
        if possible < self.h:
            return False
        for v, r, w in self.terms:
            if possible - w < self.h and space.contains(v, r) and not space.is_fixed(v):
                # this term must differ for the sum to reach h
                if not space.remove(v, r):
                    return False
        return True


class AssignmentCheck(Propagator):
    """Checks a predicate once all its variables are fixed (no pruning before)."""
    name = "check"

    def __init__(self, variables: Sequence[int], predicate: Callable[[Sequence[int]], bool]):
        super().__init__(variables)
        self.predicate = predicate

    def propagate(self, space: Space) -> bool:
        if not space.all_fixed(self.vars):
            return True
        return self.predicate([space.value(v) for v in self.vars])
