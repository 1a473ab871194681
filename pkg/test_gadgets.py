"""Tests for the gadget scanner, srate and the survival histogram."""
import numpy as np
import pytest

from gadgetdiv.analysis.gadgets import (BUCKETS, SurvivalHistogram, bucket_rates, histogram_from_pairs,
                                        mean_gadget_count, scan_gadgets, srate, srate_pairs,
                                        survival_histogram)
from gadgetdiv.errors import ConfigError
from gadgetdiv.ir import parse_listing
from gadgetdiv.models import SolutionAssignment, build_model
from gadgetdiv.solver import optimize

ORIGINAL = "00000000: addi $r1, $r2, 0\n00000004: jr $r3\n"
RENAMED = "00000000: or $r1, $r2, $r0\n00000004: jr $r4\n"
HALF = "00000000: or $r1, $r2, $r0\n00000004: jr $r3\n"


def listing(text):
    return parse_listing(text)


def straight_line(adds, base=0):
    lines = [f"{base + 4 * k:08x}: add $r1, $r1, $r2" for k in range(adds)]
    lines.append(f"{base + 4 * adds:08x}: jr $r1")
    return listing("\n".join(lines) + "\n")


@pytest.mark.parametrize("other, expected", [(ORIGINAL, 1.0), (RENAMED, 0.0), (HALF, 0.5)])
def test_srate_fixtures(isa, other, expected):
    gadgets = scan_gadgets(listing(ORIGINAL), isa)
    assert len(gadgets) == 2
    assert srate(gadgets, listing(other), isa) == expected


def test_srate_depends_on_addresses(isa):
    """Same code one slot later survives nowhere."""
    shifted = "00000004: addi $r1, $r2, 0\n00000008: jr $r3\n"
    gadgets = scan_gadgets(listing(ORIGINAL), isa)
    assert srate(gadgets, listing(shifted), isa) == 0.0


def test_srate_undefined_without_gadgets(isa):
    plain = listing("00000000: li $r1, 1\n00000004: b bb.1\n")
    gadgets = scan_gadgets(plain, isa)
    assert len(gadgets) == 0
    assert srate(gadgets, listing(ORIGINAL), isa) is None


def test_scan_stops_at_earlier_branch(isa):
    text = ("00000000: li $r1, 1\n"
            "00000004: beq $r1, $r0, bb.1\n"
            "00000008: addi $r2, $r2, 1\n"
            "0000000c: jr $r2\n")
    gadgets = scan_gadgets(listing(text), isa)
    assert sorted(g.start for g in gadgets) == [8, 12]
    assert all(g.end == 12 for g in gadgets)


def test_scan_window(isa):
    code = straight_line(10)
    assert len(scan_gadgets(code, isa, window=8)) == 8
    assert len(scan_gadgets(code, isa, window=3)) == 3
    assert len(scan_gadgets(straight_line(1), isa, window=8)) == 2
    with pytest.raises(ConfigError):
        scan_gadgets(code, isa, window=0)


def test_nops_are_not_part_of_the_body(isa):
    text = ("00000000: addi $r1, $r2, 0\n"
            "00000004: nop\n"
            "00000008: jr $r3\n")
    gadgets = {g.start: g for g in scan_gadgets(listing(text), isa)}
    assert gadgets[0].body == (("addi", ("$r1", "$r2", "0")), ("jr", ("$r3",)))
    assert gadgets[4].body == (("jr", ("$r3",)),)
    assert str(gadgets[0]) == "00000000-00000008: addi $r1, $r2, 0 ; jr $r3"


def test_every_indirect_branch_ends_gadgets(isa):
    text = ("00000000: jalr $r5\n"
            "00000004: li $r1, 1\n"
            "00000008: jr $r13\n")
    gadgets = scan_gadgets(listing(text), isa)
    assert sorted((g.start, g.end) for g in gadgets) == [(0, 0), (4, 8), (8, 8)]


def test_bucket_rates():
    """Boundaries belong to the lower bucket."""
    histogram = bucket_rates([0.0, 0.05, 0.1, 0.25, 0.4, 0.5, 1.0], num=3)
    assert histogram.counts == (1, 2, 2, 2)
    assert histogram.pairs == 7
    assert histogram.to_row() == {"=0": 1, "<=10": 2, "<=40": 2, "<=100": 2, "num": 3}


def test_empty_histogram():
    histogram = bucket_rates([], num=1)
    assert histogram.pairs == 0
    assert histogram.mode is None
    assert histogram.shares() == {name: 0.0 for name in BUCKETS}


def test_histogram_mode_and_shares():
    histogram = SurvivalHistogram(zero=6, le10=2, le40=0, le100=0, num=3)
    assert histogram.mode == "=0"
    assert histogram.shares()["=0"] == pytest.approx(0.75)


def test_srate_pairs_are_ordered(isa):
    listings = [listing(ORIGINAL), listing(RENAMED), listing(HALF)]
    pairs = srate_pairs(listings, isa)
    assert len(pairs) == 6
    rates = {(r.variant_i, r.variant_j): r.srate for r in pairs.itertuples()}
    assert rates[(0, 2)] == 0.5
    assert rates[(2, 0)] == 0.5
    assert rates[(0, 1)] == 0.0
    histogram = histogram_from_pairs(pairs, 3)
    assert histogram.pairs == 6 and histogram.num == 3


def test_srate_pairs_skip_undefined(isa):
    plain = listing("00000000: li $r1, 1\n00000004: b bb.1\n")
    pairs = srate_pairs([plain, listing(ORIGINAL)], isa)
    assert np.isnan(pairs.loc[0, "srate"])
    assert histogram_from_pairs(pairs, 2).pairs == 1


def test_survival_histogram_of_variants(bench, isa):
    fn = bench("pair")
    a = SolutionAssignment((0, 1, 2), (0, 0, 0), (1, 2, 13), 3)
    b = SolutionAssignment((1, 0, 2), (0, 0, 0), (2, 1, 13), 3)
    histogram = survival_histogram([a, b], fn, isa)
    assert histogram.num == 2
    assert histogram.pairs == 2
    # only the lone jr $r13 survives, one of three gadgets each way
    assert histogram.counts == (0, 0, 2, 0)


def test_survival_histogram_single_variant(bench, isa):
    fn = bench("factorial")
    opt = optimize(build_model(fn, isa)).solution
    histogram = survival_histogram([opt], fn, isa)
    assert histogram.pairs == 0 and histogram.num == 1


def test_mean_gadget_count(isa):
    assert mean_gadget_count([listing(ORIGINAL), straight_line(10)], isa) == 5.0
    assert mean_gadget_count([], isa) == 0.0
