"""Speed objective: frequency-weighted block cycle counts."""
import math
from typing import List, Sequence

from gadgetdiv.errors import IncompleteSolutionError, ModelError
from gadgetdiv.ir.function import Function


def makespans(fn: Function, cycles: Sequence[int]) -> List[int]:
    """Per-block makespan, i.e. the issue cycle of the block's last instruction."""
    if len(cycles) != len(fn.instructions) or any(c is None for c in cycles):
        raise IncompleteSolutionError("cycle vector does not cover every instruction", "cycles")
    return [max(cycles[i] for i in block.instructions) for block in fn.blocks]


def cost_of_cycles(fn: Function, cycles: Sequence[int]) -> int:
    return sum(block.frequency * (span + 1) for block, span in zip(fn.blocks, makespans(fn, cycles)))


def evaluate_cost(fn: Function, sol) -> int:
    """Sum over blocks of frequency * (makespan + 1)."""
    return cost_of_cycles(fn, sol.cycles)


def gap_bound(o: int, p: float) -> int:
    """Largest admissible cost for optimality gap ``p``: floor((1 + p) * o)."""
    if p < 0:
        raise ModelError(f"optimality gap must be >= 0, got {p}")
    # (1 + p) * o may land just below an integer, e.g. 1.2 * 55
    return int(math.floor(round((1.0 + p) * o, 9)))
