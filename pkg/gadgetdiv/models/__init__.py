"""Constraint model of a function, solutions and their independent checks."""
from gadgetdiv.models.solution import OptimizationResult, SolutionAssignment
from gadgetdiv.models.cost import evaluate_cost, gap_bound, makespans
from gadgetdiv.models.constraint_model import ConstraintModel, build_model, post_gap_constraint
from gadgetdiv.models.validator import check_solution

__all__ = [
    "ConstraintModel", "OptimizationResult", "SolutionAssignment", "build_model", "check_solution",
    "evaluate_cost", "gap_bound", "makespans", "post_gap_constraint",
]
