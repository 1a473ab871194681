"""Exhaustive enumeration of small functions, used as an oracle for the solver.

Nothing here touches the constraint model: schedules are enumerated per block
from the dependency list and register assignments are searched from the
interference pairs of :mod:`gadgetdiv.models.validator`.
"""
import itertools
import logging
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from gadgetdiv.errors import InfeasibleError
from gadgetdiv.ir.function import ANTI, DATA, Block, Function
from gadgetdiv.ir.isa import IsaTable
from gadgetdiv.models.solution import SolutionAssignment
from gadgetdiv.models.validator import interference_pairs

logger = logging.getLogger(__name__)

# (cycles, impls) of one block, indexed like block.instructions
BlockSchedule = Tuple[Tuple[int, ...], Tuple[int, ...]]


def block_horizon(fn: Function, isa: IsaTable, block: Block) -> int:
    """Largest makespan a block may take (sum of worst latencies plus one slot each)."""
    worst = sum(max(isa.opcode(a).latency for a in fn.instructions[i].alternatives)
                for i in block.instructions)
    return worst + len(block.instructions)


def block_schedules(fn: Function, isa: IsaTable, block: Block, makespan: int) -> List[BlockSchedule]:
    """Every feasible (cycles, impls) of ``block`` whose branch issues at ``makespan``."""
    ids = block.instructions
    if len(ids) == 1:
        if makespan != 0:
            return []
        return [((0,), (m,)) for m in range(len(fn.instructions[ids[0]].alternatives))]

    position = {ins_id: k for k, ins_id in enumerate(ids)}
    preds: Dict[int, List[Tuple[int, str]]] = {i: [] for i in ids}
    for dep in fn.dependencies:
        if dep.consumer in position:
            preds[dep.consumer].append((dep.producer, dep.kind))

    cycles: Dict[int, int] = {}
    impls: Dict[int, int] = {}
    found: List[BlockSchedule] = []

    def latency(producer: int, kind: str) -> int:
        if kind == DATA:
            return isa.opcode(fn.instructions[producer].alternatives[impls[producer]]).latency
        return 0 if kind == ANTI else 1

    def ready(ins_id: int) -> bool:
        return all(cycles[ins_id] >= cycles[p] + latency(p, kind) for p, kind in preds[ins_id])

    def extend(k: int, used: frozenset) -> None:
        if k == len(ids) - 1:
            branch = ids[-1]
            cycles[branch] = makespan
            for m in range(len(fn.instructions[branch].alternatives)):
                impls[branch] = m
                if ready(branch):
                    found.append((tuple(cycles[i] for i in ids), tuple(impls[i] for i in ids)))
            return
        ins_id = ids[k]
        for m in range(len(fn.instructions[ins_id].alternatives)):
            impls[ins_id] = m
            for c in range(makespan):
                if c in used:
                    continue
                cycles[ins_id] = c
                if ready(ins_id):
                    extend(k + 1, used | {c})

    extend(0, frozenset())
    return found


def _conflicts(fn: Function, cycles: Sequence[int]) -> Dict[str, set]:
    conflicts: Dict[str, set] = {t.id: set() for t in fn.temps}
    for a, b in interference_pairs(fn, cycles):
        conflicts[a].add(b)
        conflicts[b].add(a)
    return conflicts


def colorings(fn: Function, isa: IsaTable, cycles: Sequence[int]) -> Iterator[Dict[str, int]]:
    """Register assignments of all temps that respect interference under ``cycles``."""
    temps = [t.id for t in fn.temps]
    registers = [r for r in isa.allocatable if r not in fn.fixed_registers]
    conflicts = _conflicts(fn, cycles)
    assigned: Dict[str, int] = {}

    def color(k: int) -> Iterator[Dict[str, int]]:
        if k == len(temps):
            yield dict(assigned)
            return
        t = temps[k]
        taken = {assigned[u] for u in conflicts[t] if u in assigned}
        for r in registers:
            if r not in taken:
                assigned[t] = r
                yield from color(k + 1)
                del assigned[t]

    yield from color(0)


def _assemble(fn: Function, parts: Sequence[BlockSchedule], coloring: Dict[str, int]) -> SolutionAssignment:
    cycles = [0] * len(fn.instructions)
    impls = [0] * len(fn.instructions)
    for block, (block_cycles, block_impls) in zip(fn.blocks, parts):
        for ins_id, c, m in zip(block.instructions, block_cycles, block_impls):
            cycles[ins_id] = c
            impls[ins_id] = m
    regs = []
    for ins_id, pos in fn.operands:
        op = fn.instructions[ins_id].operands[pos]
        regs.append(coloring[op.temp] if op.temp is not None else op.precolor)
    cost = sum(b.frequency * (cycles[b.branch] + 1) for b in fn.blocks)
    return SolutionAssignment(tuple(cycles), tuple(impls), tuple(regs), cost)


def _makespan_vectors(fn: Function, isa: IsaTable, bound: Optional[int]) -> List[Tuple[int, ...]]:
    """Makespan per block, in ascending order of total cost, pruned by ``bound``."""
    ranges = []
    for block in fn.blocks:
        lo = len(block.instructions) - 1
        hi = 0 if lo == 0 else block_horizon(fn, isa, block)
        ranges.append(range(lo, hi + 1))
    vectors = []
    for spans in itertools.product(*ranges):
        cost = sum(b.frequency * (s + 1) for b, s in zip(fn.blocks, spans))
        if bound is None or cost <= bound:
            vectors.append((cost, spans))
    vectors.sort()
    return [spans for _, spans in vectors]


def enumerate_solutions(fn: Function, isa: IsaTable, bound: Optional[int] = None,
                        registers: bool = True) -> Iterator[SolutionAssignment]:
    """Every feasible solution with cost at most ``bound``, cheapest makespans first.

    With ``registers=False`` each feasible schedule is yielded once, carrying the
    first register assignment found for it. Only meant for toy functions.
    """
    @lru_cache(maxsize=None)
    def schedules(block_index: int, span: int) -> Tuple[BlockSchedule, ...]:
        return tuple(block_schedules(fn, isa, fn.blocks[block_index], span))

    for spans in _makespan_vectors(fn, isa, bound):
        per_block = [schedules(k, s) for k, s in enumerate(spans)]
        if any(not options for options in per_block):
            continue
        for parts in itertools.product(*per_block):
            cycles = _assemble(fn, parts, {t.id: 0 for t in fn.temps}).cycles
            for coloring in colorings(fn, isa, cycles):
                yield _assemble(fn, parts, coloring)
                if not registers:
                    break


def minimum_cost(fn: Function, isa: IsaTable) -> int:
    """Optimal cost found by enumeration."""
    for sol in enumerate_solutions(fn, isa, registers=False):
        logger.debug(f"{fn.name}: enumeration optimum {sol.cost}")
        return sol.cost
    raise InfeasibleError(f"{fn.name}: no feasible solution exists")


def enumerate_schedules(fn: Function, isa: IsaTable, bound: Optional[int] = None
                        ) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Distinct register-feasible (cycles, impls) pairs within ``bound``."""
    return [(s.cycles, s.impls) for s in enumerate_solutions(fn, isa, bound, registers=False)]
