"""Variant generation: LNS, decomposition-based LNS, random search and incremental max-diversity."""
from gadgetdiv.diversify.base_diversifier import (Algorithm, BaseDiversifier, DiversifyConfig,
                                                  VariantSet)
from gadgetdiv.diversify.dlns import DLNSDiversifier, run_dlns
from gadgetdiv.diversify.lns import LNSDiversifier, NeighborhoodSearch, run_lns
from gadgetdiv.diversify.maxdiv import MaxDivDiversifier, run_maxdiv
from gadgetdiv.diversify.rs import RSDiversifier, run_rs
from gadgetdiv.diversify.validation import validate_variant_set

DIVERSIFIERS = {
    Algorithm.LNS: LNSDiversifier,
    Algorithm.DLNS: DLNSDiversifier,
    Algorithm.RS: RSDiversifier,
    Algorithm.MAXDIV: MaxDivDiversifier,
}


def diversify(fn, isa, cfg: DiversifyConfig, optimum=None) -> VariantSet:
    """Run the algorithm named by ``cfg.algorithm``."""
    return DIVERSIFIERS[cfg.algorithm](fn, isa, cfg, optimum).run()


__all__ = [
    "Algorithm", "BaseDiversifier", "DIVERSIFIERS", "DLNSDiversifier", "DiversifyConfig",
    "LNSDiversifier", "MaxDivDiversifier", "NeighborhoodSearch", "RSDiversifier", "VariantSet",
    "diversify", "run_dlns", "run_lns", "run_maxdiv", "run_rs", "validate_variant_set",
]
