"""The finite-domain backend model of a function: variables, constraints, objective."""
import itertools
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

from gadgetdiv.errors import IncompleteSolutionError, ModelError
from gadgetdiv.ir.function import ANTI, DATA, Function
from gadgetdiv.ir.isa import IsaTable
from gadgetdiv.models.cost import gap_bound
from gadgetdiv.models.solution import SolutionAssignment
from gadgetdiv.solver.propagators import (AllDifferent, LiveRangeInterference, NotEqual,
                                          ObjectiveCeiling, Precedence, Propagator)
from gadgetdiv.solver.space import Space, mask_of, range_mask

logger = logging.getLogger(__name__)

CYCLE = "c"
IMPL = "m"
REG = "r"


class ConstraintModel:
    """Variables c_i, m_i (one per instruction) and r_t (one per temp).

    Variable numbering: ``c_i = i``, ``m_i = n + i``, ``r_t = 2n + k`` for the
    k-th temp of the function. Models are never mutated after construction;
    posting a constraint returns a new model sharing the old propagators.
    """

    def __init__(self, fn: Function, isa: IsaTable, domains: Sequence[int],
                 propagators: Sequence[Propagator], horizons: Sequence[int],
                 cost_bound: Optional[int] = None):
        self.fn = fn
        self.isa = isa
        self.domains: Tuple[int, ...] = tuple(domains)
        self.propagators: Tuple[Propagator, ...] = tuple(propagators)
        self.horizons: Tuple[int, ...] = tuple(horizons)
        self.cost_bound = cost_bound
        self.n = len(fn.instructions)
        self.temp_var: Dict[str, int] = {t.id: 2 * self.n + k for k, t in enumerate(fn.temps)}

        operand_var: List[Optional[int]] = []
        operand_const: List[Optional[int]] = []
        for ins_id, pos in fn.operands:
            op = fn.instructions[ins_id].operands[pos]
            operand_var.append(self.temp_var[op.temp] if op.temp is not None else None)
            operand_const.append(op.precolor)
        self.operand_var: Tuple[Optional[int], ...] = tuple(operand_var)
        self.operand_const: Tuple[Optional[int], ...] = tuple(operand_const)

        self.objective_index = next(k for k, p in enumerate(self.propagators)
                                    if isinstance(p, ObjectiveCeiling))
        watchers: List[List[int]] = [[] for _ in self.domains]
        for k, p in enumerate(self.propagators):
            for v in p.vars:
                watchers[v].append(k)
        self.watchers: Tuple[Tuple[int, ...], ...] = tuple(tuple(w) for w in watchers)

    # -- variables -------------------------------------------------------

    @property
    def num_vars(self) -> int:
        return len(self.domains)

    def cycle_var(self, ins_id: int) -> int:
        return ins_id

    def impl_var(self, ins_id: int) -> int:
        return self.n + ins_id

    def kind(self, v: int) -> str:
        if v < self.n:
            return CYCLE
        if v < 2 * self.n:
            return IMPL
        return REG

    @property
    def cycle_vars(self) -> Tuple[int, ...]:
        return tuple(range(self.n))

    @property
    def global_vars(self) -> Tuple[int, ...]:
        return tuple(self.temp_var[t.id] for t in self.fn.global_temps)

    def block_vars(self, block_id: str) -> Tuple[int, ...]:
        """Local decision variables of a block: cycles, implementations, local temp registers."""
        block = self.fn.block(block_id)
        cs = [self.cycle_var(i) for i in block.instructions]
        ms = [self.impl_var(i) for i in block.instructions]
        rs = [self.temp_var[t.id] for t in self.fn.local_temps(block_id)]
        return tuple(cs + ms + rs)

    # -- derived models ----------------------------------------------------

    def with_propagators(self, extra: Sequence[Propagator]) -> "ConstraintModel":
        return ConstraintModel(self.fn, self.isa, self.domains, self.propagators + tuple(extra),
                               self.horizons, self.cost_bound)

    def with_cost_bound(self, bound: Optional[int]) -> "ConstraintModel":
        return ConstraintModel(self.fn, self.isa, self.domains, self.propagators,
                               self.horizons, bound)

    def clone(self) -> "ConstraintModel":
        return self.with_propagators(())

    # -- conversions -------------------------------------------------------

    def root_space(self) -> Space:
        ceiling = math.inf if self.cost_bound is None else self.cost_bound
        return Space(list(self.domains), ceiling)

    def cost_of_values(self, values: Sequence[int]) -> int:
        return sum(b.frequency * (values[self.cycle_var(b.branch)] + 1) for b in self.fn.blocks)

    def solution_from_values(self, values: Sequence[int]) -> SolutionAssignment:
        cycles = tuple(values[i] for i in range(self.n))
        impls = tuple(values[self.n + i] for i in range(self.n))
        regs = tuple(values[v] if v is not None else c
                     for v, c in zip(self.operand_var, self.operand_const))
        return SolutionAssignment(cycles, impls, regs, self.cost_of_values(values))

    def solution_from_space(self, space: Space) -> SolutionAssignment:
        values = space.assignment()
        if values is None:
            raise IncompleteSolutionError("space still has unassigned variables")
        return self.solution_from_values(values)

    def values_from_solution(self, sol: SolutionAssignment) -> List[int]:
        """Per-variable values of a solution (the inverse of ``solution_from_values``)."""
        if len(sol.cycles) != self.n or len(sol.impls) != self.n or len(sol.regs) != len(self.operand_var):
            raise IncompleteSolutionError("solution shape does not match the model")
        values = list(sol.cycles) + list(sol.impls) + [0] * len(self.temp_var)
        for v, reg in zip(self.operand_var, sol.regs):
            if v is not None:
                values[v] = reg
        return values

    def __repr__(self) -> str:
        return (f"ConstraintModel({self.fn.name}: {self.num_vars} vars, "
                f"{len(self.propagators)} propagators, bound={self.cost_bound})")


def _latency(isa: IsaTable, alternatives: Sequence[int]) -> Tuple[int, ...]:
    return tuple(isa.opcode(a).latency for a in alternatives)


def build_model(fn: Function, isa: IsaTable) -> ConstraintModel:
    """Variables, structural constraints and the objective for ``fn``."""
    n = len(fn.instructions)
    domains: List[int] = [0] * (2 * n + len(fn.temps))
    horizons: List[int] = []
    props: List[Propagator] = []

    for block in fn.blocks:
        size = len(block.instructions)
        # slack of one cycle per instruction admits nop-padded schedules
        horizon = sum(max(_latency(isa, fn.instructions[i].alternatives))
                      for i in block.instructions) + size
        horizons.append(horizon)
        for i in block.instructions:
            ins = fn.instructions[i]
            if i == block.branch:
                # a lone branch has nothing to wait for
                domains[i] = range_mask(size - 1, horizon if size > 1 else 0)
            else:
                domains[i] = range_mask(0, horizon - 1)
            domains[n + i] = range_mask(0, len(ins.alternatives) - 1)
        if size > 1:
            props.append(AllDifferent(block.instructions))
            for i in block.instructions[:-1]:
                props.append(Precedence(i, block.branch, latency=1))

    for dep in fn.dependencies:
        if dep.kind == DATA:
            alternatives = fn.instructions[dep.producer].alternatives
            props.append(Precedence(dep.producer, dep.consumer, impl=n + dep.producer,
                                    latencies=_latency(isa, alternatives)))
        elif dep.kind == ANTI:
            props.append(Precedence(dep.producer, dep.consumer, latency=0))
        else:
            props.append(Precedence(dep.producer, dep.consumer, latency=1))

    registers = mask_of(isa.allocatable) & ~mask_of(fn.fixed_registers)
    available = registers.bit_count()
    temp_var = {t.id: 2 * n + k for k, t in enumerate(fn.temps)}
    for t in fn.temps:
        domains[temp_var[t.id]] = registers
    if available == 0 and fn.temps:
        raise ModelError(f"{fn.name}: no allocatable register is left for temps")

    live_blocks = {t.id: fn.live_blocks(t.id) for t in fn.global_temps}
    for block in fn.blocks:
        live_here = [g for g in live_blocks if block.id in live_blocks[g]]
        if len(live_here) > available:
            raise ModelError(f"{fn.name}: {len(live_here)} global temps live in {block.id} "
                             f"but only {available} registers are available")
    for a, b in itertools.combinations(fn.global_temps, 2):
        if live_blocks[a.id] & live_blocks[b.id]:
            props.append(NotEqual(temp_var[a.id], temp_var[b.id]))

    for block in fn.blocks:
        locals_ = fn.local_temps(block.id)
        for g in fn.global_temps:
            if block.id in live_blocks[g.id]:
                for t in locals_:
                    props.append(NotEqual(temp_var[g.id], temp_var[t.id]))
        for a, b in itertools.combinations(locals_, 2):
            props.append(LiveRangeInterference(
                temp_var[a.id], a.defs, a.defs + a.uses,
                temp_var[b.id], b.defs, b.defs + b.uses))

    props.append(ObjectiveCeiling([b.branch for b in fn.blocks], [b.frequency for b in fn.blocks]))

    if any(d == 0 for d in domains):
        raise ModelError(f"{fn.name}: empty domain at build time")
    model = ConstraintModel(fn, isa, domains, props, horizons)
    logger.debug(f"Built {model!r}")
    return model


def post_gap_constraint(model: ConstraintModel, o: int, p: float) -> ConstraintModel:
    """Restrict the objective to at most floor((1 + p) * o)."""
    bound = gap_bound(o, p)
    if model.cost_bound is not None:
        bound = min(bound, model.cost_bound)
    return model.with_cost_bound(bound)
