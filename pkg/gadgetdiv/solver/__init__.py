"""A small finite-domain constraint engine."""
from gadgetdiv.solver.space import Space
from gadgetdiv.solver.search import (Branching, PartialAssignment, SearchEngine, SearchParams,
                                     SearchStatus, ValueMemory, optimize, propagate, relax,
                                     relax_values, solve_next)

__all__ = [
    "Branching", "PartialAssignment", "SearchEngine", "SearchParams", "SearchStatus", "Space",
    "ValueMemory", "optimize", "propagate", "relax", "relax_values", "solve_next",
]
