"""Distances between variants, gadget survival and transformation counts."""
from gadgetdiv.analysis.distances import (DistanceKind, DistanceSpec, channel, directed_distance,
                                          gadget_distance, hamming, levenshtein, measure,
                                          pairwise_distance, post_distance_constraint, wagner_fischer)
from gadgetdiv.analysis.gadgets import (Gadget, GadgetSet, SurvivalHistogram, scan_gadgets, srate,
                                        srate_pairs, survival_histogram)
from gadgetdiv.analysis.transformations import TransformationCounts, classify_transformations, mean_transformations

__all__ = [
    "DistanceKind", "DistanceSpec", "Gadget", "GadgetSet", "SurvivalHistogram",
    "TransformationCounts", "channel", "classify_transformations", "directed_distance",
    "gadget_distance", "hamming", "levenshtein", "measure", "pairwise_distance",
    "mean_transformations", "post_distance_constraint", "wagner_fischer", "scan_gadgets", "srate", "srate_pairs", "survival_histogram",
]
