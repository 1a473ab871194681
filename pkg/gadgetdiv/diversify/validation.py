"""Independent checks of a finished variant set."""
import itertools
import logging
from typing import List

from gadgetdiv.analysis.distances import DistanceSpec, directed_distance
from gadgetdiv.diversify.base_diversifier import VariantSet
from gadgetdiv.ir.function import Function
from gadgetdiv.ir.isa import IsaTable
from gadgetdiv.models.validator import check_solution

logger = logging.getLogger(__name__)


def validate_variant_set(fn: Function, isa: IsaTable, variants: VariantSet, spec: DistanceSpec,
                         check_distance: bool = True) -> List[str]:
    """Violations of the gap bound, of solution validity and, optionally, of pairwise distance.

    Pairs are compared in generation order, the earlier variant first.
    """
    problems: List[str] = []
    if not variants.solutions:
        return ["variant set is empty"]
    if variants.solutions[0].cost != variants.o:
        problems.append(f"first variant costs {variants.solutions[0].cost}, optimum is {variants.o}")
    for k, sol in enumerate(variants.solutions):
        problems.extend(f"variant {k}: {p}" for p in check_solution(fn, isa, sol, variants.bound))
    keys = [s.key for s in variants.solutions]
    if len(set(keys)) != len(keys):
        problems.append("variant set contains duplicates")
    if check_distance:
        for (i, a), (j, b) in itertools.combinations(enumerate(variants.solutions), 2):
            d = directed_distance(a, b, fn, spec)
            if d < spec.h:
                problems.append(f"variants {i} and {j} are at distance {d} < {spec.h}")
    if problems:
        logger.warning(f"{fn.name}: {len(problems)} problems in the {variants.algorithm} variant set")
    return problems
