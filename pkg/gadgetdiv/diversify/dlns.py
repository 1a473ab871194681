"""Decomposition-based LNS: global registers first, then per-block local variants, then recombination."""
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Dict, List, Optional, Sequence

from gadgetdiv.analysis.distances import directed_distance
from gadgetdiv.diversify.base_diversifier import Algorithm, BaseDiversifier, DiversifyConfig, VariantSet
from gadgetdiv.diversify.lns import NeighborhoodSearch
from gadgetdiv.ir.function import Block, Function
from gadgetdiv.ir.isa import IsaTable
from gadgetdiv.models.solution import OptimizationResult, SolutionAssignment
from gadgetdiv.models.validator import check_solution
from gadgetdiv.solver.search import Branching, SearchEngine, SearchStatus, ValueMemory, relax_values

logger = logging.getLogger(__name__)

LocalSolution = Dict[int, int]


class DLNSDiversifier(BaseDiversifier):
    algorithm = Algorithm.DLNS.value

    def initialize_model(self) -> None:
        super().initialize_model()
        model = self.base_model
        self.optimum_values = dict(enumerate(model.values_from_solution(self.optimum.solution)))
        self.global_vars = model.global_vars
        self.globals: Dict[int, int] = {v: self.optimum_values[v] for v in self.global_vars}
        self.params = replace(self.cfg.search, branching=Branching.RANDOM)
        self.seen = {self.optimum.solution.key}
        self.idle_rounds = 0

    def solve_globals(self) -> Dict[int, int]:
        """Relax-and-repair the registers of global temps, preferring a new assignment."""
        if not self.global_vars:
            return {}
        found: Optional[Dict[int, int]] = None
        for _ in range(self.cfg.max_relax_attempts):
            partial = relax_values(self.globals, self.cfg.global_relax_rate, self.rng, self.global_vars)
            engine = SearchEngine(self.base_model, self.params, rng=self.rng, deadline=self.deadline,
                                  branch_vars=self.global_vars)
            status, space = engine.search(partial, self.params.failure_limit, restart=False)
            if status is SearchStatus.TIMEOUT:
                break
            if status is SearchStatus.SOLUTION:
                found = space.fixed_values(self.global_vars)
                if found != self.globals:
                    break
        if found is None:
            logger.debug(f"{self.fn.name}: global registers kept from the previous round")
            return dict(self.globals)
        return found

    def _pinned(self, block: Block, global_values: Dict[int, int]) -> Dict[int, int]:
        """Global registers plus the optimum's schedule of every other block."""
        model = self.base_model
        pinned = dict(global_values)
        for other in self.fn.blocks:
            if other.id == block.id:
                continue
            for i in other.instructions:
                pinned[model.cycle_var(i)] = self.optimum_values[model.cycle_var(i)]
                pinned[model.impl_var(i)] = self.optimum_values[model.impl_var(i)]
        return pinned

    def solve_block(self, block: Block, global_values: Dict[int, int], seed: int) -> List[LocalSolution]:
        """Up to ``locals_per_block`` mutually distant local solutions of one block."""
        variables = self.base_model.block_vars(block.id)
        search = NeighborhoodSearch(self.base_model, variables, self.cfg.spec, self.cfg.search,
                                    random.Random(seed), self.deadline, self.cfg.max_relax_attempts,
                                    pinned=self._pinned(block, global_values))
        values = search.first()
        local: List[LocalSolution] = []
        while values is not None:
            local.append({v: values[v] for v in variables})
            if len(local) >= self.cfg.locals_per_block:
                break
            search.accept(values)
            values = search.next()
        logger.debug(f"{self.fn.name}: {len(local)} local solutions for {block.id}")
        return local

    def combine(self, global_values: Dict[int, int], locals_: Sequence[List[LocalSolution]],
                accepted: List[SolutionAssignment],
                picks: Optional[ValueMemory] = None) -> Optional[SolutionAssignment]:
        """One local solution per block on top of ``global_values``.

        None unless the combination is valid, new and far enough from every variant.

        With ``picks`` each block takes one of its least picked local solutions,
        and the choice is recorded once the combination is accepted.
        """
        values = dict(global_values)
        chosen: Dict[int, int] = {}
        for b, options in enumerate(locals_):
            indices = list(range(len(options)))
            if picks is not None:
                indices = picks.least_used(b, indices)
            chosen[b] = self.rng.choice(indices)
            values.update(options[chosen[b]])
        model = self.base_model
        sol = model.solution_from_values([values[v] for v in range(model.num_vars)])
        if sol.key in self.seen:
            return None
        problems = check_solution(self.fn, self.isa, sol, model.cost_bound)
        if problems:
            logger.debug(f"{self.fn.name}: combination rejected: {problems[0]}")
            return None
        spec = self.cfg.spec
        for earlier in list(self.variants.solutions) + accepted:
            if directed_distance(earlier, sol, self.fn, spec) < spec.h:
                return None
        if picks is not None:
            picks.record(chosen)
        return sol

    def step(self) -> Optional[List[SolutionAssignment]]:
        global_values = self.solve_globals()
        self.globals = global_values
        blocks = self.fn.blocks
        seeds = [self.rng.getrandbits(32) for _ in blocks]
        with ThreadPoolExecutor(max_workers=self.cfg.workers) as pool:
            futures = [pool.submit(self.solve_block, b, global_values, s) for b, s in zip(blocks, seeds)]
            locals_ = [f.result() for f in futures]

        accepted: List[SolutionAssignment] = []
        if all(locals_):
            attempts = self.cfg.combine_attempts or 10 * len(blocks)
            room = self.cfg.k - len(self.variants)
            picks = ValueMemory()
            for _ in range(attempts):
                if len(accepted) >= room or self.expired():
                    break
                sol = self.combine(global_values, locals_, accepted, picks)
                if sol is not None:
                    self.seen.add(sol.key)
                    accepted.append(sol)
        else:
            logger.debug(f"{self.fn.name}: a block has no local solution under these global registers")

        if accepted:
            self.idle_rounds = 0
            return accepted
        self.idle_rounds += 1
        if self.expired() or self.idle_rounds >= self.cfg.max_relax_attempts:
            return None
        return []


def run_dlns(fn: Function, isa: IsaTable, cfg: DiversifyConfig,
             optimum: Optional[OptimizationResult] = None) -> VariantSet:
    """Variants assembled from independently diversified blocks."""
    return DLNSDiversifier(fn, isa, cfg, optimum).run()
