"""Which code transformations separate two variants of one function."""
import itertools
from dataclasses import asdict, dataclass, fields
from typing import Dict, Sequence

import numpy as np

from gadgetdiv.errors import DistanceError
from gadgetdiv.ir.function import Function
from gadgetdiv.models.solution import SolutionAssignment


@dataclass(frozen=True)
class TransformationCounts:
    nop_slots: int = 0       # per block, difference in filler slots
    copy_changes: int = 0    # instructions implemented by another alternative
    reorderings: int = 0     # instruction pairs whose relative order flipped
    renamings: int = 0       # operands in another register

    @property
    def total(self) -> int:
        return self.nop_slots + self.copy_changes + self.reorderings + self.renamings

    def as_dict(self) -> Dict[str, int]:
        return asdict(self)


def classify_transformations(fn: Function, s1: SolutionAssignment, s2: SolutionAssignment) -> TransformationCounts:
    n = len(fn.instructions)
    for sol in (s1, s2):
        if len(sol.cycles) != n or len(sol.regs) != len(fn.operands):
            raise DistanceError(f"solution does not belong to function {fn.name}")
    c1, c2 = np.asarray(s1.cycles), np.asarray(s2.cycles)

    nop_slots = 0
    reorderings = 0
    for block in fn.blocks:
        size = len(block.instructions)
        nop_slots += abs(int(c1[block.branch]) - int(c2[block.branch]))
        for i, j in itertools.combinations(block.instructions[:size - 1], 2):
            if (c1[i] < c1[j]) != (c2[i] < c2[j]):
                reorderings += 1

    copy_changes = sum(1 for ins in fn.instructions
                       if len(ins.alternatives) > 1 and s1.impls[ins.id] != s2.impls[ins.id])
    renamings = int(np.count_nonzero(np.asarray(s1.regs) != np.asarray(s2.regs)))
    return TransformationCounts(nop_slots, copy_changes, reorderings, renamings)


def mean_transformations(fn: Function, solutions: Sequence[SolutionAssignment]) -> Dict[str, float]:
    """Mean transformation counts of every variant against the first one (the optimum).

    NaN for each count when there is no second variant.
    """
    names = [f.name for f in fields(TransformationCounts)]
    if len(solutions) < 2:
        return {name: float("nan") for name in names}
    counts = np.array([[getattr(classify_transformations(fn, solutions[0], sol), name) for name in names]
                       for sol in solutions[1:]], dtype=float)
    return {name: round(float(value), 3) for name, value in zip(names, counts.mean(axis=0))}
