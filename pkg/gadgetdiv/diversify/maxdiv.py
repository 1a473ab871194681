"""Incremental most-diverse set: each new variant maximizes its minimum distance to the set."""
import logging
from dataclasses import replace
from typing import List, Optional

from gadgetdiv.analysis.distances import min_distance, post_distance_constraint
from gadgetdiv.diversify.base_diversifier import Algorithm, BaseDiversifier, DiversifyConfig, VariantSet
from gadgetdiv.ir.function import Function
from gadgetdiv.ir.isa import IsaTable
from gadgetdiv.models.solution import OptimizationResult, SolutionAssignment
from gadgetdiv.solver.search import Branching, SearchEngine, SearchStatus

logger = logging.getLogger(__name__)


class MaxDivDiversifier(BaseDiversifier):
    algorithm = Algorithm.MAXDIV.value

    def initialize_model(self) -> None:
        super().initialize_model()
        self.params = replace(self.cfg.search, branching=Branching.ORIGINAL)

    def maximize(self) -> Optional[SolutionAssignment]:
        """Raise the required minimum distance until no solution is left.

        Returns the last solution found, or None when the set cannot grow or
        the time limit interrupts the search before the maximum is proven.
        """
        spec = self.cfg.spec
        required = spec.h
        best: Optional[SolutionAssignment] = None
        while True:
            model = self.base_model
            for sol in self.variants.solutions:
                model = post_distance_constraint(model, sol, replace(spec, h=required))
            engine = SearchEngine(model, self.params, rng=self.rng, deadline=self.deadline)
            status, space = engine.search(None, failure_limit=None)
            if status is SearchStatus.EXHAUSTED:
                return best
            if status is not SearchStatus.SOLUTION:
                logger.warning(f"{self.fn.name}: maximization interrupted at distance {required - 1}, "
                               "candidate dropped")
                return None
            best = model.solution_from_space(space)
            required = min_distance(best, self.variants.solutions, self.fn, spec) + 1
            logger.debug(f"{self.fn.name}: candidate at minimum distance {required - 1}")

    def step(self) -> Optional[List[SolutionAssignment]]:
        best = self.maximize()
        return None if best is None else [best]


def run_maxdiv(fn: Function, isa: IsaTable, cfg: DiversifyConfig,
               optimum: Optional[OptimizationResult] = None) -> VariantSet:
    """Variants chosen one by one to be as far as possible from those already chosen."""
    return MaxDivDiversifier(fn, isa, cfg, optimum).run()
