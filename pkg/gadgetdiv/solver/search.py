"""Depth-first search with restarts, branch-and-bound and the LNS relax step."""
import logging
import random
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from gadgetdiv.errors import ConfigError, InfeasibleError, SolverTimeoutError
from gadgetdiv.models.solution import OptimizationResult, SolutionAssignment
from gadgetdiv.solver.space import Space

if TYPE_CHECKING:
    from gadgetdiv.models.constraint_model import ConstraintModel

logger = logging.getLogger(__name__)


class Branching(Enum):
    ORIGINAL = "original"  # in order, min value first, registers at random
    RANDOM = "random"      # random variable, random value


class SearchStatus(Enum):
    SOLUTION = "solution"
    EXHAUSTED = "exhausted"
    RESTART = "restart"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class SearchParams:
    branching: Branching = Branching.RANDOM
    failure_limit: Optional[int] = 1000
    relax_rate: float = 0.6
    seed: int = 0
    time_limit: float = 60.0

    def __post_init__(self):
        if not 0.0 <= self.relax_rate <= 1.0:
            raise ConfigError(f"relax rate must be in [0, 1], got {self.relax_rate}")
        if self.failure_limit is not None and self.failure_limit < 1:
            raise ConfigError(f"failure limit must be >= 1, got {self.failure_limit}")
        if self.time_limit <= 0:
            raise ConfigError(f"time limit must be positive, got {self.time_limit}")


@dataclass(frozen=True)
class PartialAssignment:
    """Variables kept at their incumbent value; everything else is free."""
    fixed: Dict[int, int]
    relaxed: Tuple[int, ...] = field(default=())


def propagate(space: Space, model: "ConstraintModel", seeds: Iterable[int]) -> bool:
    """Run propagators to a fixpoint starting from ``seeds`` (propagator indices)."""
    props = model.propagators
    watchers = model.watchers
    queue = list(dict.fromkeys(seeds))
    queued = set(queue)
    head = 0
    while head < len(queue):
        k = queue[head]
        head += 1
        queued.discard(k)
        space.changed.clear()
        if not props[k].propagate(space):
            return False
        for v in space.changed:
            for j in watchers[v]:
                if j not in queued:
                    queued.add(j)
                    queue.append(j)
    space.changed.clear()
    return True


class ValueMemory:
    """How often each variable took each value in the solutions accepted so far.

    Random branching with a memory picks among the least used values of a
    variable's domain.
    """

    def __init__(self):
        self.counts: Dict[int, Dict[int, int]] = {}

    def record(self, values: Mapping[int, int]) -> None:
        for var, value in values.items():
            seen = self.counts.setdefault(var, {})
            seen[value] = seen.get(value, 0) + 1

    def least_used(self, var: int, candidates: Sequence[int]) -> List[int]:
        seen = self.counts.get(var)
        if not seen or not candidates:
            return list(candidates)
        fewest = min(seen.get(v, 0) for v in candidates)
        return [v for v in candidates if seen.get(v, 0) == fewest]


class SearchEngine:
    """One search over one model; owns its random stream and its deadline."""

    def __init__(self, model: "ConstraintModel", params: SearchParams,
                 rng: Optional[random.Random] = None, deadline: Optional[float] = None,
                 branch_vars: Optional[Sequence[int]] = None, memory: Optional[ValueMemory] = None):
        self.model = model
        self.params = params
        self.rng = rng if rng is not None else random.Random(params.seed)
        self.deadline = deadline if deadline is not None else time.monotonic() + params.time_limit
        self.branch_vars = tuple(branch_vars) if branch_vars is not None else tuple(range(model.num_vars))
        self.memory = memory
        self.failures = 0
        self.restarts = 0
        self.nodes = 0
        self.ceiling = float("inf")

    def expired(self) -> bool:
        return time.monotonic() >= self.deadline

    def prepare(self, partial: Optional[PartialAssignment] = None) -> Optional[Space]:
        """Root space with a partial assignment applied and propagated; None if inconsistent."""
        space = self.model.root_space()
        if partial is not None:
            for v, value in partial.fixed.items():
                if not space.assign(v, value):
                    return None
        if not propagate(space, self.model, range(len(self.model.propagators))):
            return None
        return space

    def _select(self, space: Space) -> Optional[Tuple[int, int]]:
        free = [v for v in self.branch_vars if not space.is_fixed(v)]
        if not free:
            return None
        if self.params.branching is Branching.ORIGINAL:
            var = free[0]
            if self.model.kind(var) == "r":
                return var, self.rng.choice(space.values(var))
            return var, space.lb(var)
        var = self.rng.choice(free)
        values = space.values(var)
        if self.memory is not None:
            values = self.memory.least_used(var, values)
        return var, self.rng.choice(values)

    def run_once(self, root: Space, failure_limit: Optional[int],
                 minimize: bool = False) -> Tuple[SearchStatus, Optional[Space]]:
        """Depth-first search from an already propagated root.

        Without ``minimize`` the first complete space is returned. With it,
        every solution lowers the ceiling and the search continues; the last
        (best) space is returned with EXHAUSTED when optimality is proven.
        """
        model = self.model
        stack = [(root, ())]
        failures = 0
        best: Optional[Space] = None
        while stack:
            self.nodes += 1
            if self.expired():
                return SearchStatus.TIMEOUT, best
            space, seeds = stack.pop()
            if minimize and space.ceiling > self.ceiling:
                space.ceiling = self.ceiling
                seeds = tuple(seeds) + (model.objective_index,)
            if seeds and not propagate(space, model, seeds):
                failures += 1
                self.failures += 1
                if failure_limit is not None and failures >= failure_limit:
                    return SearchStatus.RESTART, best
                continue
            choice = self._select(space)
            if choice is None:
                if not minimize:
                    return SearchStatus.SOLUTION, space
                best = space
                cost = model.cost_of_values([space.lb(v) for v in range(model.num_vars)])
                self.ceiling = cost - 1
                logger.debug(f"{model.fn.name}: incumbent cost {cost} after {self.nodes} nodes")
                continue
            var, value = choice
            right = space.copy()
            right.doms[var] &= ~(1 << value)
            left = space.copy()
            left.doms[var] = 1 << value
            watchers = model.watchers[var]
            stack.append((right, watchers))
            stack.append((left, watchers))
        return SearchStatus.EXHAUSTED, best

    def search(self, partial: Optional[PartialAssignment] = None,
               failure_limit: Optional[int] = None,
               restart: bool = True) -> Tuple[SearchStatus, Optional[Space]]:
        """First solution, restarting from the root whenever the failure limit is hit."""
        while True:
            root = self.prepare(partial)
            if root is None:
                return SearchStatus.EXHAUSTED, None
            status, space = self.run_once(root, failure_limit)
            if status is not SearchStatus.RESTART:
                return status, space
            self.restarts += 1
            logger.debug(f"{self.model.fn.name}: restart {self.restarts} after {self.failures} failures")
            if not restart:
                return status, None
            if self.expired():
                return SearchStatus.TIMEOUT, None


def solve_next(model: "ConstraintModel", params: SearchParams,
               rng: Optional[random.Random] = None,
               partial: Optional[PartialAssignment] = None,
               deadline: Optional[float] = None) -> Optional[SolutionAssignment]:
    """First solution under the configured branching, with restarts; None on exhaustion or timeout."""
    engine = SearchEngine(model, params, rng=rng, deadline=deadline)
    status, space = engine.search(partial, params.failure_limit)
    if status is SearchStatus.SOLUTION:
        return model.solution_from_space(space)
    return None


def optimize(model: "ConstraintModel", params: Optional[SearchParams] = None) -> OptimizationResult:
    """Branch-and-bound minimization of the objective with the ORIGINAL branching."""
    params = replace(params or SearchParams(), branching=Branching.ORIGINAL)
    engine = SearchEngine(model, params)
    root = engine.prepare()
    if root is None:
        raise InfeasibleError(f"{model.fn.name}: model is inconsistent at the root")
    status, best = engine.run_once(root, failure_limit=None, minimize=True)
    if best is None:
        if status is SearchStatus.TIMEOUT:
            raise SolverTimeoutError(f"{model.fn.name}: no solution within {params.time_limit}s")
        raise InfeasibleError(f"{model.fn.name}: model has no solution")
    solution = model.solution_from_space(best)
    proven = status is SearchStatus.EXHAUSTED
    if proven:
        logger.info(f"{model.fn.name}: optimal cost {solution.cost} ({engine.nodes} nodes)")
    else:
        logger.warning(f"{model.fn.name}: time limit hit, best cost {solution.cost} is not proven optimal")
    return OptimizationResult(solution, solution.cost, proven)


def relax_values(values: Mapping[int, int], relax_rate: float, rng: random.Random,
                 variables: Sequence[int]) -> PartialAssignment:
    """Free each of ``variables`` with probability ``relax_rate``; fix the rest to ``values``."""
    fixed: Dict[int, int] = {}
    relaxed = []
    for v in variables:
        if rng.random() < relax_rate:
            relaxed.append(v)
        else:
            fixed[v] = values[v]
    return PartialAssignment(fixed, tuple(relaxed))


def relax(sol: SolutionAssignment, model: "ConstraintModel", relax_rate: float,
          rng: random.Random, variables: Optional[Sequence[int]] = None) -> PartialAssignment:
    """Destroy step: free each decision variable independently with probability ``relax_rate``."""
    values = model.values_from_solution(sol)
    candidates = range(model.num_vars) if variables is None else variables
    return relax_values(values, relax_rate, rng, candidates)
