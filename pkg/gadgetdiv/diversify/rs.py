"""Random search baseline: restart from scratch with random branching, keep new variants."""
import logging
from dataclasses import replace
from typing import List, Optional

from gadgetdiv.diversify.base_diversifier import Algorithm, BaseDiversifier, DiversifyConfig, VariantSet
from gadgetdiv.ir.function import Function
from gadgetdiv.ir.isa import IsaTable
from gadgetdiv.models.solution import OptimizationResult, SolutionAssignment
from gadgetdiv.solver.search import Branching, SearchEngine, SearchStatus

logger = logging.getLogger(__name__)


class RSDiversifier(BaseDiversifier):
    """No distance constraints; duplicates are dropped and ``stall_limit`` repeats in a row end the run."""
    algorithm = Algorithm.RS.value

    def initialize_model(self) -> None:
        super().initialize_model()
        self.params = replace(self.cfg.search, branching=Branching.RANDOM)
        self.seen = {self.optimum.solution.key}
        self.stalled = 0

    def step(self) -> Optional[List[SolutionAssignment]]:
        while self.stalled < self.cfg.stall_limit:
            engine = SearchEngine(self.base_model, self.params, rng=self.rng, deadline=self.deadline)
            status, space = engine.search(None, self.params.failure_limit)
            if status is not SearchStatus.SOLUTION:
                return None
            sol = self.base_model.solution_from_space(space)
            if sol.key not in self.seen:
                self.seen.add(sol.key)
                self.stalled = 0
                return [sol]
            self.stalled += 1
        logger.debug(f"{self.fn.name}: {self.stalled} repeated solutions in a row")
        return None


def run_rs(fn: Function, isa: IsaTable, cfg: DiversifyConfig,
           optimum: Optional[OptimizationResult] = None) -> VariantSet:
    """Distinct variants from independent random searches."""
    return RSDiversifier(fn, isa, cfg, optimum).run()
