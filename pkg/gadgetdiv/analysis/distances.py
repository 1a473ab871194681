"""Distances between program variants: Hamming, Levenshtein and gadget-targeted.

Every distance has a measurement form (pure functions on two solutions) and
a constraint form (:func:`post_distance_constraint`) used while generating
variants.
"""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Collection, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from gadgetdiv.errors import ConfigError, DistanceError, IncompleteSolutionError
from gadgetdiv.ir.function import Function
from gadgetdiv.models.constraint_model import ConstraintModel
from gadgetdiv.models.solution import SolutionAssignment
from gadgetdiv.solver.propagators import AssignmentCheck, DistanceAtLeast, Propagator

logger = logging.getLogger(__name__)


class DistanceKind(Enum):
    HD = "hd"
    LD = "ld"
    GD = "gd"


@dataclass(frozen=True)
class DistanceSpec:
    """Which distance to use and the minimum pairwise value ``h``.

    ``n_r`` and ``n_c`` are the register and schedule windows of the gadget
    distance, both counted in issue cycles before an indirect branch.
    """
    kind: DistanceKind = DistanceKind.HD
    h: int = 1
    n_r: int = 0
    n_c: int = 8

    def __post_init__(self):
        if not isinstance(self.kind, DistanceKind):
            try:
                object.__setattr__(self, "kind", DistanceKind(str(self.kind).lower()))
            except ValueError as e:
                raise ConfigError(f"unknown distance {self.kind!r} (expected hd, ld or gd)") from e
        if self.h < 1:
            raise ConfigError(f"distance threshold h must be >= 1, got {self.h}")
        if self.n_r < 0 or self.n_c < 0:
            raise ConfigError(f"gadget distance windows must be >= 0, got n_r={self.n_r}, n_c={self.n_c}")

    @property
    def label(self) -> str:
        if self.kind is DistanceKind.GD:
            return f"gd({self.n_r},{self.n_c})"
        return self.kind.value


def _check_pair(s1: SolutionAssignment, s2: SolutionAssignment) -> None:
    if len(s1.cycles) != len(s2.cycles) or len(s1.regs) != len(s2.regs):
        raise DistanceError("solutions belong to different functions")


def _check_function(sol: SolutionAssignment, fn: Function) -> None:
    if len(sol.cycles) != len(fn.instructions) or len(sol.regs) != len(fn.operands):
        raise DistanceError(f"solution does not belong to function {fn.name}")


def hamming(s1: SolutionAssignment, s2: SolutionAssignment) -> int:
    """Number of instructions issued in different cycles."""
    _check_pair(s1, s2)
    return int(np.count_nonzero(np.asarray(s1.cycles) != np.asarray(s2.cycles)))


def channel(sol: SolutionAssignment, fn: Function) -> Tuple[int, ...]:
    """Instruction ids ordered by block, then by issue cycle."""
    if len(sol.cycles) != len(fn.instructions) or any(c is None for c in sol.cycles):
        raise IncompleteSolutionError("solution does not schedule every instruction", "cycles")
    order: List[int] = []
    for block in fn.blocks:
        order.extend(sorted(block.instructions, key=lambda i: sol.cycles[i]))
    return tuple(order)


def wagner_fischer(a: Sequence[int], b: Sequence[int]) -> int:
    """Edit distance with unit insertion, deletion and replacement costs."""
    if len(a) == 0 or len(b) == 0:
        return max(len(a), len(b))
    b_arr = np.asarray(b)
    cols = np.arange(len(b) + 1)
    prev = cols.copy()
    for i, token in enumerate(a, start=1):
        replace = prev[:-1] + (b_arr != token)
        row = np.empty_like(prev)
        row[0] = i
        row[1:] = np.minimum(prev[1:] + 1, replace)
        # insertions: row[j] = min over k <= j of row[k] + (j - k)
        row = cols + np.minimum.accumulate(row - cols)
        prev = row
    return int(prev[-1])


def levenshtein(s1: SolutionAssignment, s2: SolutionAssignment, fn: Function) -> int:
    """Edit distance between the two channels."""
    _check_pair(s1, s2)
    _check_function(s1, fn)
    return wagner_fischer(channel(s1, fn), channel(s2, fn))


def _operand_slots(fn: Function) -> Dict[int, List[int]]:
    slots: Dict[int, List[int]] = {ins.id: [] for ins in fn.instructions}
    for k, (ins_id, _) in enumerate(fn.operands):
        slots[ins_id].append(k)
    return slots


def gadget_distance(s1: SolutionAssignment, s2: SolutionAssignment, fn: Function,
                    n_r: int, n_c: int) -> int:
    """Differences near indirect branches, with windows taken from ``s1``.

    An instruction of a branch's block counts when ``s1`` issues it between 0
    and ``n_c`` cycles before the branch and the two cycles differ; each of its
    operands counts when it lies within ``n_r`` cycles and the registers differ.
    """
    _check_pair(s1, s2)
    _check_function(s1, fn)
    c1, c2 = np.asarray(s1.cycles), np.asarray(s2.cycles)
    r1, r2 = np.asarray(s1.regs), np.asarray(s2.regs)
    slots = _operand_slots(fn)
    total = 0
    for br in fn.indirect_branches:
        block = fn.block(fn.instructions[br].block)
        ids = np.asarray(block.instructions)
        gap = c1[br] - c1[ids]
        in_c = (gap >= 0) & (gap <= n_c)
        total += int(np.count_nonzero(in_c & (c1[ids] != c2[ids])))
        for i in ids[(gap >= 0) & (gap <= n_r)]:
            k = slots[int(i)]
            total += int(np.count_nonzero(r1[k] != r2[k]))
    return total


def directed_distance(s1: SolutionAssignment, s2: SolutionAssignment, fn: Function,
                      spec: DistanceSpec) -> int:
    """Distance in the form posted as a constraint (GD windows from ``s1``)."""
    if spec.kind is DistanceKind.HD:
        return hamming(s1, s2)
    if spec.kind is DistanceKind.LD:
        return levenshtein(s1, s2, fn)
    return gadget_distance(s1, s2, fn, spec.n_r, spec.n_c)


def measure(s1: SolutionAssignment, s2: SolutionAssignment, fn: Function, spec: DistanceSpec) -> int:
    """Symmetric distance used for reporting."""
    if spec.kind is DistanceKind.GD:
        return max(gadget_distance(s1, s2, fn, spec.n_r, spec.n_c),
                   gadget_distance(s2, s1, fn, spec.n_r, spec.n_c))
    return directed_distance(s1, s2, fn, spec)


def pairwise_distance(solutions: Sequence[SolutionAssignment], spec: DistanceSpec, fn: Function) -> float:
    """Mean distance over all unordered pairs."""
    if len(solutions) < 2:
        raise DistanceError(f"pairwise distance needs at least 2 solutions, got {len(solutions)}")
    values = [measure(a, b, fn, spec) for a, b in itertools.combinations(solutions, 2)]
    return float(np.mean(values))


def min_distance(candidate: SolutionAssignment, solutions: Sequence[SolutionAssignment],
                 fn: Function, spec: DistanceSpec) -> int:
    """Smallest directed distance from any member of ``solutions`` to ``candidate``."""
    return min(directed_distance(s, candidate, fn, spec) for s in solutions)


def gadget_weights(model: ConstraintModel, values: Mapping[int, int], n_r: int, n_c: int) -> Dict[int, int]:
    """Per model variable, how many gadget-distance terms it feeds under the windows of ``values``."""
    fn = model.fn
    weights: Dict[int, int] = {}
    for br in fn.indirect_branches:
        block = fn.block(fn.instructions[br].block)
        if any(model.cycle_var(i) not in values for i in block.instructions):
            continue
        for i in block.instructions:
            gap = values[model.cycle_var(br)] - values[model.cycle_var(i)]
            if 0 <= gap <= n_c:
                v = model.cycle_var(i)
                weights[v] = weights.get(v, 0) + 1
            if 0 <= gap <= n_r:
                for op in fn.instructions[i].operands:
                    # fixed registers never differ
                    if op.temp is not None:
                        v = model.temp_var[op.temp]
                        weights[v] = weights.get(v, 0) + 1
    return weights


def distance_propagator(model: ConstraintModel, values: Mapping[int, int], spec: DistanceSpec,
                        variables: Optional[Collection[int]] = None) -> Propagator:
    """``directed_distance(reference, y) >= h`` with the reference given per model variable.

    With ``variables`` only terms over those variables are counted, which is how
    block-local searches compare local solutions.
    """
    fn = model.fn
    keep = set(variables) if variables is not None else None
    if spec.kind is DistanceKind.HD:
        cycle_vars = [v for v in model.cycle_vars if keep is None or v in keep]
        return DistanceAtLeast(cycle_vars, [values[v] for v in cycle_vars], [1] * len(cycle_vars), spec.h)
    if spec.kind is DistanceKind.GD:
        weights = gadget_weights(model, values, spec.n_r, spec.n_c)
        terms = sorted(v for v in weights if keep is None or v in keep)
        if not terms:
            logger.warning(f"{fn.name}: no gadget-distance term to post, no later solution can differ")
        return DistanceAtLeast(terms, [values[v] for v in terms], [weights[v] for v in terms], spec.h)

    members = [ins.id for ins in fn.instructions if keep is None or model.cycle_var(ins.id) in keep]
    cycle_vars = [model.cycle_var(i) for i in members]
    position = {i: k for k, i in enumerate(members)}
    h = spec.h

    def order(cycle_of) -> List[int]:
        tokens: List[int] = []
        for block in fn.blocks:
            tokens.extend(sorted((i for i in block.instructions if i in position), key=cycle_of))
        return tokens

    reference = order(lambda i: values[model.cycle_var(i)])

    def far_enough(cycles: Sequence[int]) -> bool:
        return wagner_fischer(reference, order(lambda i: cycles[position[i]])) >= h

    return AssignmentCheck(cycle_vars, far_enough)


def post_distance_constraint(model: ConstraintModel, sol: SolutionAssignment,
                             spec: DistanceSpec) -> ConstraintModel:
    """Require ``directed_distance(sol, y) >= h`` of every later solution ``y``."""
    _check_function(sol, model.fn)
    values = dict(enumerate(model.values_from_solution(sol)))
    return model.with_propagators([distance_propagator(model, values, spec)])
