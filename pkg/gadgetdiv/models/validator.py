"""Independent re-verification of solutions, recomputed from the function alone."""
import itertools
import logging
from typing import Dict, List, Optional, Sequence, Set, Tuple

from gadgetdiv.ir.function import ANTI, DATA, Function
from gadgetdiv.ir.isa import IsaTable
from gadgetdiv.models.cost import cost_of_cycles

logger = logging.getLogger(__name__)


def live_range(fn: Function, temp_id: str, cycles: Sequence[int]) -> Tuple[int, int]:
    """Closed interval [first def, last def-or-use] of a local temp."""
    temp = fn.temp(temp_id)
    start = min(cycles[i] for i in temp.defs)
    end = max(cycles[i] for i in temp.defs + temp.uses)
    return start, end


def interference_pairs(fn: Function, cycles: Sequence[int]) -> Set[Tuple[str, str]]:
    """Temp pairs that must not share a register under the given schedule."""
    pairs: Set[Tuple[str, str]] = set()
    live = {t.id: fn.live_blocks(t.id) for t in fn.global_temps}
    for a, b in itertools.combinations(fn.global_temps, 2):
        if live[a.id] & live[b.id]:
            pairs.add((a.id, b.id))
    for block in fn.blocks:
        locals_ = fn.local_temps(block.id)
        for g in fn.global_temps:
            if block.id in live[g.id]:
                pairs.update((g.id, t.id) for t in locals_)
        for a, b in itertools.combinations(locals_, 2):
            sa, ea = live_range(fn, a.id, cycles)
            sb, eb = live_range(fn, b.id, cycles)
            if sa <= eb and sb <= ea:
                pairs.add((a.id, b.id))
    return pairs


def temp_registers(fn: Function, regs: Sequence[int]) -> Dict[str, List[int]]:
    """Registers seen on each temp's operands."""
    seen: Dict[str, List[int]] = {t.id: [] for t in fn.temps}
    for k, (ins_id, pos) in enumerate(fn.operands):
        op = fn.instructions[ins_id].operands[pos]
        if op.temp is not None:
            seen[op.temp].append(regs[k])
    return seen


def check_schedule(fn: Function, isa: IsaTable, cycles: Sequence[int], impls: Sequence[int]) -> List[str]:
    problems: List[str] = []
    for block in fn.blocks:
        block_cycles = [cycles[i] for i in block.instructions]
        if any(c < 0 for c in block_cycles):
            problems.append(f"{block.id}: negative issue cycle")
        if len(set(block_cycles)) != len(block_cycles):
            problems.append(f"{block.id}: two instructions issue in the same cycle")
        branch_cycle = cycles[block.branch]
        if any(cycles[i] >= branch_cycle for i in block.instructions[:-1]):
            problems.append(f"{block.id}: branch does not issue last")
    for i, ins in enumerate(fn.instructions):
        if not 0 <= impls[i] < len(ins.alternatives):
            problems.append(f"instruction {i}: implementation {impls[i]} out of range")
    if problems:
        return problems
    for dep in fn.dependencies:
        if dep.kind == DATA:
            opcode = fn.instructions[dep.producer].alternatives[impls[dep.producer]]
            latency = isa.opcode(opcode).latency
        elif dep.kind == ANTI:
            latency = 0
        else:
            latency = 1
        if cycles[dep.consumer] < cycles[dep.producer] + latency:
            problems.append(f"{dep.kind} dependency {dep.producer}->{dep.consumer} violated "
                            f"({cycles[dep.producer]} + {latency} > {cycles[dep.consumer]})")
    return problems


def check_registers(fn: Function, isa: IsaTable, cycles: Sequence[int], regs: Sequence[int]) -> List[str]:
    problems: List[str] = []
    for k, (ins_id, pos) in enumerate(fn.operands):
        op = fn.instructions[ins_id].operands[pos]
        if op.precolor is not None and regs[k] != op.precolor:
            problems.append(f"operand {k}: fixed register $r{op.precolor} replaced by $r{regs[k]}")
    allowed = set(isa.allocatable) - set(fn.fixed_registers)
    assigned: Dict[str, int] = {}
    for temp_id, seen in temp_registers(fn, regs).items():
        if len(set(seen)) != 1:
            problems.append(f"{temp_id}: operands disagree on the register {sorted(set(seen))}")
            continue
        if seen[0] not in allowed:
            problems.append(f"{temp_id}: register $r{seen[0]} is not available to temps")
        assigned[temp_id] = seen[0]
    for a, b in interference_pairs(fn, cycles):
        if a in assigned and b in assigned and assigned[a] == assigned[b]:
            problems.append(f"{a} and {b} are live together in $r{assigned[a]}")
    return problems


def check_solution(fn: Function, isa: IsaTable, sol, bound: Optional[int] = None) -> List[str]:
    """All constraint violations of ``sol`` (empty when valid)."""
    n = len(fn.instructions)
    if len(sol.cycles) != n or len(sol.impls) != n or len(sol.regs) != len(fn.operands):
        return ["solution shape does not match the function"]
    problems = check_schedule(fn, isa, sol.cycles, sol.impls)
    problems += check_registers(fn, isa, sol.cycles, sol.regs)
    if not problems:
        cost = cost_of_cycles(fn, sol.cycles)
        if cost != sol.cost:
            problems.append(f"recorded cost {sol.cost} differs from actual cost {cost}")
        if bound is not None and cost > bound:
            problems.append(f"cost {cost} exceeds the bound {bound}")
    if problems:
        logger.debug(f"{fn.name}: invalid solution: {problems}")
    return problems


def is_valid(fn: Function, isa: IsaTable, sol, bound: Optional[int] = None) -> bool:
    return not check_solution(fn, isa, sol, bound)
