"""Solutions (program variants) and optimization results."""
from dataclasses import dataclass
from typing import Any, Dict, Tuple

from gadgetdiv.errors import IncompleteSolutionError


@dataclass(frozen=True)
class SolutionAssignment:
    """A full assignment: issue cycle and implementation per instruction, register per operand."""
    cycles: Tuple[int, ...]
    impls: Tuple[int, ...]
    regs: Tuple[int, ...]
    cost: int

    @property
    def key(self) -> Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]:
        """Identity of the variant, ignoring the derived cost."""
        return (self.cycles, self.impls, self.regs)

    def to_record(self, variant: int) -> Dict[str, Any]:
        return {
            "variant": variant,
            "cost": self.cost,
            "cycles": list(self.cycles),
            "impls": list(self.impls),
            "regs": list(self.regs),
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "SolutionAssignment":
        try:
            return cls(
                cycles=tuple(int(v) for v in record["cycles"]),
                impls=tuple(int(v) for v in record["impls"]),
                regs=tuple(int(v) for v in record["regs"]),
                cost=int(record["cost"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise IncompleteSolutionError(f"bad solution record: {str(e)}") from e


@dataclass(frozen=True)
class OptimizationResult:
    """The optimum ``y_opt`` and its cost ``o``; ``proven`` is False after a timeout."""
    solution: SolutionAssignment
    cost: int
    proven: bool = True
