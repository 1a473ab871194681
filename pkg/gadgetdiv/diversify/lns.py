"""Large neighborhood search: relax the newest variant, repair it, demand distance."""
import logging
import random
from dataclasses import replace
from typing import Dict, List, Mapping, Optional, Sequence

from gadgetdiv.analysis.distances import DistanceSpec, distance_propagator
from gadgetdiv.diversify.base_diversifier import Algorithm, BaseDiversifier, DiversifyConfig, VariantSet
from gadgetdiv.ir.function import Function
from gadgetdiv.ir.isa import IsaTable
from gadgetdiv.models.constraint_model import ConstraintModel
from gadgetdiv.models.solution import OptimizationResult, SolutionAssignment
from gadgetdiv.solver.search import (Branching, PartialAssignment, SearchEngine, SearchParams,
                                     SearchStatus, ValueMemory, relax_values)

logger = logging.getLogger(__name__)


class NeighborhoodSearch:
    """Relax-and-repair over ``variables`` with everything in ``pinned`` held fixed.

    Each accepted assignment adds a distance constraint against it, so the
    next repair has to move at least ``h`` away from every accepted one.
    Repairs try the values accepted assignments used least.
    """

    def __init__(self, model: ConstraintModel, variables: Sequence[int], spec: DistanceSpec,
                 params: SearchParams, rng: random.Random, deadline: float,
                 max_relax_attempts: int = 8, pinned: Optional[Mapping[int, int]] = None):
        self.model = model
        self.variables = tuple(variables)
        self.spec = spec
        self.params = replace(params, branching=Branching.RANDOM)
        self.rng = rng
        self.deadline = deadline
        self.max_relax_attempts = max_relax_attempts
        self.pinned: Dict[int, int] = dict(pinned or {})
        self.memory = ValueMemory()
        self.incumbent: Optional[Dict[int, int]] = None
        self.exhausted = False
        self.restarts = 0
        self.fallbacks = 0

    def _engine(self) -> SearchEngine:
        return SearchEngine(self.model, self.params, rng=self.rng, deadline=self.deadline,
                            branch_vars=self.variables, memory=self.memory)

    def _values(self, space) -> Dict[int, int]:
        values = dict(self.pinned)
        values.update(space.fixed_values(self.variables))
        return values

    def accept(self, values: Mapping[int, int]) -> None:
        """Make ``values`` the incumbent and forbid anything closer than ``h`` to it."""
        local = len(self.variables) < self.model.num_vars
        propagator = distance_propagator(self.model, values, self.spec,
                                         self.variables if local else None)
        self.model = self.model.with_propagators([propagator])
        self.memory.record({v: values[v] for v in self.variables})
        self.incumbent = dict(values)

    def first(self) -> Optional[Dict[int, int]]:
        """Any assignment consistent with the pinned values (complete search)."""
        status, space = self._engine().search(PartialAssignment(self.pinned), failure_limit=None)
        if status is SearchStatus.SOLUTION:
            return self._values(space)
        self.exhausted = status is SearchStatus.EXHAUSTED
        return None

    def next(self) -> Optional[Dict[int, int]]:
        """Repair a fresh relaxation of the incumbent; None on exhaustion or timeout."""
        for _ in range(self.max_relax_attempts):
            partial = relax_values(self.incumbent, self.params.relax_rate, self.rng, self.variables)
            fixed = dict(self.pinned)
            fixed.update(partial.fixed)
            engine = self._engine()
            status, space = engine.search(PartialAssignment(fixed, partial.relaxed),
                                          self.params.failure_limit, restart=False)
            if status is SearchStatus.SOLUTION:
                return self._values(space)
            if status is SearchStatus.TIMEOUT:
                return None
            self.restarts += 1
            logger.debug(f"{self.model.fn.name}: relaxation {self.restarts} gave nothing ({status.value})")

        # the neighborhoods look empty: one complete search of the unrelaxed problem
        self.fallbacks += 1
        status, space = self._engine().search(PartialAssignment(self.pinned), failure_limit=None)
        if status is SearchStatus.SOLUTION:
            return self._values(space)
        self.exhausted = status is SearchStatus.EXHAUSTED
        return None


class LNSDiversifier(BaseDiversifier):
    algorithm = Algorithm.LNS.value

    def initialize_model(self) -> None:
        super().initialize_model()
        model = self.base_model
        self.search = NeighborhoodSearch(model, range(model.num_vars), self.cfg.spec, self.cfg.search,
                                         self.rng, self.deadline, self.cfg.max_relax_attempts)
        self.search.accept(dict(enumerate(model.values_from_solution(self.optimum.solution))))

    def step(self) -> Optional[List[SolutionAssignment]]:
        values = self.search.next()
        if values is None:
            return None
        self.search.accept(values)
        return [self.base_model.solution_from_values([values[v] for v in range(self.base_model.num_vars)])]


def run_lns(fn: Function, isa: IsaTable, cfg: DiversifyConfig,
            optimum: Optional[OptimizationResult] = None) -> VariantSet:
    """Variants by relax-and-repair from the optimum."""
    return LNSDiversifier(fn, isa, cfg, optimum).run()
