"""Base class for variant generators."""
import logging
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from gadgetdiv.analysis.distances import DistanceSpec
from gadgetdiv.errors import ConfigError
from gadgetdiv.ir.function import Function
from gadgetdiv.ir.isa import IsaTable
from gadgetdiv.models.constraint_model import ConstraintModel, build_model, post_gap_constraint
from gadgetdiv.models.solution import OptimizationResult, SolutionAssignment
from gadgetdiv.solver.search import SearchParams, optimize

logger = logging.getLogger(__name__)

# why a run stopped
REASON_K = "k"
REASON_TIMEOUT = "timeout"
REASON_EXHAUSTED = "exhausted"


class Algorithm(Enum):
    LNS = "lns"
    DLNS = "dlns"
    RS = "rs"
    MAXDIV = "maxdiv"


@dataclass(frozen=True)
class DiversifyConfig:
    algorithm: Algorithm = Algorithm.LNS
    k: int = 200
    p: float = 0.10
    spec: DistanceSpec = field(default_factory=DistanceSpec)
    search: SearchParams = field(default_factory=SearchParams)
    global_relax_rate: float = 0.5
    locals_per_block: int = 10
    combine_attempts: Optional[int] = None  # None: 10 per block
    max_relax_attempts: int = 8
    stall_limit: int = 100
    workers: int = 1

    def __post_init__(self):
        if not isinstance(self.algorithm, Algorithm):
            try:
                object.__setattr__(self, "algorithm", Algorithm(str(self.algorithm).lower()))
            except ValueError as e:
                raise ConfigError(f"unknown algorithm {self.algorithm!r}") from e
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.p < 0:
            raise ConfigError(f"optimality gap must be >= 0, got {self.p}")
        if not 0.0 <= self.global_relax_rate <= 1.0:
            raise ConfigError(f"global relax rate must be in [0, 1], got {self.global_relax_rate}")
        for name in ("locals_per_block", "max_relax_attempts", "stall_limit", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.combine_attempts is not None and self.combine_attempts < 1:
            raise ConfigError(f"combine_attempts must be >= 1, got {self.combine_attempts}")


@dataclass
class VariantSet:
    """Variants of one function, the optimum first, with their generation times."""
    function: str
    algorithm: str
    o: int
    bound: int
    solutions: List[SolutionAssignment] = field(default_factory=list)
    timestamps: List[float] = field(default_factory=list)
    reason: str = ""
    proven: bool = True

    def add(self, sol: SolutionAssignment, seconds: float) -> None:
        self.solutions.append(sol)
        self.timestamps.append(seconds)

    @property
    def elapsed(self) -> float:
        return self.timestamps[-1] if self.timestamps else 0.0

    def __len__(self) -> int:
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)


class BaseDiversifier:
    """Optimizes a function, bounds its cost and collects variants until k or the time limit.

    Subclasses implement :meth:`step`, returning the variants found in one
    iteration (possibly none) or None once their search space is exhausted.
    """
    algorithm = "base"

    def __init__(self, fn: Function, isa: IsaTable, cfg: DiversifyConfig,
                 optimum: Optional[OptimizationResult] = None):
        self.fn = fn
        self.isa = isa
        self.cfg = cfg
        self.optimum = optimum
        self.rng = random.Random(cfg.search.seed)
        self.base_model: Optional[ConstraintModel] = None
        self.variants: Optional[VariantSet] = None
        self.started = 0.0
        self.deadline = 0.0

    def initialize_model(self) -> None:
        """Build the model, find the optimum if none was given, post the gap bound."""
        model = build_model(self.fn, self.isa)
        if self.optimum is None:
            self.optimum = optimize(model, self.cfg.search)
        self.base_model = post_gap_constraint(model, self.optimum.cost, self.cfg.p)
        self.started = time.monotonic()
        self.deadline = self.started + self.cfg.search.time_limit
        self.variants = VariantSet(self.fn.name, self.algorithm, self.optimum.cost,
                                   self.base_model.cost_bound, proven=self.optimum.proven)
        self.variants.add(self.optimum.solution, 0.0)
        logger.info(f"{self.fn.name}: {self.algorithm} starts from cost {self.optimum.cost}, "
                    f"bound {self.base_model.cost_bound}")

    def elapsed(self) -> float:
        return time.monotonic() - self.started

    def expired(self) -> bool:
        return time.monotonic() >= self.deadline

    def accept(self, sol: SolutionAssignment) -> None:
        self.variants.add(sol, round(self.elapsed(), 3))
        if len(self.variants) % 10 == 0:
            logger.info(f"{self.fn.name}: {len(self.variants)} variants after {self.elapsed():.1f}s")

    def step(self) -> Optional[List[SolutionAssignment]]:
        raise NotImplementedError

    def run(self) -> VariantSet:
        if self.variants is None:
            self.initialize_model()
        try:
            while len(self.variants) < self.cfg.k:
                if self.expired():
                    self.variants.reason = REASON_TIMEOUT
                    break
                found = self.step()
                if found is None:
                    self.variants.reason = REASON_TIMEOUT if self.expired() else REASON_EXHAUSTED
                    break
                for sol in found:
                    if len(self.variants) < self.cfg.k:
                        self.accept(sol)
            else:
                self.variants.reason = REASON_K
        except Exception as e:
            logger.error(f"{self.fn.name}: {self.algorithm} failed: {str(e)}", exc_info=True)
            raise
        logger.info(f"{self.fn.name}: {self.algorithm} stopped ({self.variants.reason}) "
                    f"with {len(self.variants)} variants")
        return self.variants
