"""Tests for HD, LD and GD against naive re-implementations, and for their constraint forms."""
import itertools
import random

import numpy as np
import pytest

from gadgetdiv.analysis import (DistanceKind, DistanceSpec, channel, classify_transformations,
                                gadget_distance, hamming, levenshtein, measure, mean_transformations,
                                pairwise_distance, post_distance_constraint, wagner_fischer)
from gadgetdiv.analysis.distances import directed_distance
from gadgetdiv.errors import ConfigError, DistanceError
from gadgetdiv.models import SolutionAssignment, build_model
from gadgetdiv.solver import SearchParams, optimize, solve_next


def random_solution(fn, rng, max_cycle=6, registers=6):
    """Arbitrary vectors of the right shape; the distances never look at validity."""
    cycles = tuple(rng.randrange(max_cycle) for _ in fn.instructions)
    impls = tuple(rng.randrange(len(ins.alternatives)) for ins in fn.instructions)
    regs = tuple(rng.randrange(1, registers + 1) for _ in fn.operands)
    return SolutionAssignment(cycles, impls, regs, 0)


def naive_hamming(a, b):
    return sum(1 for x, y in zip(a.cycles, b.cycles) if x != y)


def naive_channel(fn, sol):
    order = []
    for block in fn.blocks:
        order += sorted(block.instructions, key=lambda i: (sol.cycles[i], i))
    return order


def naive_edit_distance(a, b):
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        for j in range(len(b) + 1):
            if i == 0 or j == 0:
                table[i][j] = i + j
            else:
                table[i][j] = min(table[i - 1][j] + 1, table[i][j - 1] + 1,
                                  table[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return table[-1][-1]


def naive_gadget_distance(fn, a, b, n_r, n_c):
    total = 0
    flat = list(fn.operands)
    for br in fn.indirect_branches:
        block = fn.block(fn.instructions[br].block)
        for i in block.instructions:
            gap = a.cycles[br] - a.cycles[i]
            if 0 <= gap <= n_c and a.cycles[i] != b.cycles[i]:
                total += 1
            if 0 <= gap <= n_r:
                for k, (ins_id, _) in enumerate(flat):
                    if ins_id == i and a.regs[k] != b.regs[k]:
                        total += 1
    return total


@pytest.mark.parametrize("bench_id", ["factorial", "ulaw2alaw", "dispatch"])
def test_distances_match_naive(bench, bench_id):
    """500 random pairs per function."""
    fn = bench(bench_id)
    rng = random.Random(bench_id)
    for _ in range(500):
        a, b = random_solution(fn, rng), random_solution(fn, rng)
        assert hamming(a, b) == naive_hamming(a, b)
        assert list(channel(a, fn)) == naive_channel(fn, a)
        assert levenshtein(a, b, fn) == naive_edit_distance(naive_channel(fn, a), naive_channel(fn, b))
        n_r, n_c = rng.randrange(3), rng.randrange(9)
        assert gadget_distance(a, b, fn, n_r, n_c) == naive_gadget_distance(fn, a, b, n_r, n_c)


@pytest.mark.parametrize("a, b, expected", [
    ("kitten", "sitting", 3),
    ("", "abc", 3),
    ("abc", "", 3),
    ("abc", "abc", 0),
    ("abcd", "dcba", 4),
    ("flaw", "lawn", 2),
    ("abc", "abdc", 1),
])
def test_wagner_fischer(a, b, expected):
    assert wagner_fischer([ord(c) for c in a], [ord(c) for c in b]) == expected


SHIFT = "func shift\nblock bb.0 freq=1\n  t1 <- li 64\n  t2 <- li 1\n  $r2 <- addi t2, 1\n  jr t1\n"


def schedule_slots(sol, fn):
    """Instruction id per issue cycle, -1 for a filler slot."""
    slots = [-1] * (max(sol.cycles) + 1)
    for i in fn.instructions:
        slots[sol.cycles[i.id]] = i.id
    return slots


def with_registers(fn, cycles, registers):
    regs = tuple(registers.get(fn.operand(k).temp, fn.operand(k).precolor) for k in range(len(fn.operands)))
    return SolutionAssignment(cycles, (0,) * len(cycles), regs, max(cycles) + 1)


def test_filler_slot_shift(parse):
    """One filler slot after the first instruction: three cycles move, one edit."""
    fn = parse(SHIFT)
    a = with_registers(fn, (0, 1, 2, 3), {"t1": 1, "t2": 2})
    b = with_registers(fn, (0, 2, 3, 4), {"t1": 1, "t2": 2})
    assert hamming(a, b) == 3
    assert wagner_fischer(schedule_slots(a, fn), schedule_slots(b, fn)) == 1
    assert levenshtein(a, b, fn) == 0


def test_gadget_distance_of_filler_and_branch_register(parse):
    """A filler slot before the branch and another branch register are two differences."""
    fn = parse(SHIFT)
    a = with_registers(fn, (0, 1, 2, 3), {"t1": 1, "t2": 2})
    b = with_registers(fn, (0, 1, 2, 4), {"t1": 4, "t2": 2})
    assert gadget_distance(a, b, fn, n_r=0, n_c=3) == 2
    assert measure(a, b, fn, DistanceSpec(DistanceKind.GD, n_r=0, n_c=3)) == 2


def test_identical_solutions_are_at_distance_zero(bench):
    fn = bench("ulaw2alaw")
    sol = random_solution(fn, random.Random(1))
    for kind in DistanceKind:
        assert measure(sol, sol, fn, DistanceSpec(kind)) == 0


def test_gadget_measure_is_symmetric(bench):
    fn = bench("ulaw2alaw")
    rng = random.Random(5)
    spec = DistanceSpec(DistanceKind.GD, n_r=1, n_c=4)
    for _ in range(50):
        a, b = random_solution(fn, rng), random_solution(fn, rng)
        assert measure(a, b, fn, spec) == measure(b, a, fn, spec)
        assert measure(a, b, fn, spec) >= directed_distance(a, b, fn, spec)


def test_pairwise_distance_is_the_mean(bench):
    fn = bench("factorial")
    rng = random.Random(2)
    sols = [random_solution(fn, rng) for _ in range(4)]
    spec = DistanceSpec()
    expected = np.mean([naive_hamming(a, b) for a, b in itertools.combinations(sols, 2)])
    assert pairwise_distance(sols, spec, fn) == pytest.approx(expected)


def test_pairwise_distance_errors(bench):
    fn = bench("factorial")
    sol = random_solution(fn, random.Random(0))
    with pytest.raises(DistanceError):
        pairwise_distance([sol], DistanceSpec(), fn)
    other = random_solution(bench("pair"), random.Random(0))
    with pytest.raises(DistanceError):
        hamming(sol, other)


@pytest.mark.parametrize("kwargs", [{"h": 0}, {"kind": "xd"}, {"n_r": -1}, {"n_c": -2}])
def test_distance_spec_validation(kwargs):
    with pytest.raises(ConfigError):
        DistanceSpec(**kwargs)


def test_distance_spec_from_string():
    spec = DistanceSpec("GD", 2, 0, 8)
    assert spec.kind is DistanceKind.GD
    assert spec.label == "gd(0,8)"
    assert DistanceSpec().label == "hd"


@pytest.mark.parametrize("kind", list(DistanceKind))
def test_posted_distance_holds(bench, isa, kind):
    """The next solution is at least h away from the one the constraint was posted for."""
    fn = bench("factorial")
    model = build_model(fn, isa)
    opt = optimize(model).solution
    spec = DistanceSpec(kind, h=2, n_r=1, n_c=8)
    constrained = post_distance_constraint(model.with_cost_bound(60), opt, spec)
    sol = solve_next(constrained, SearchParams(seed=4))
    assert sol is not None
    assert directed_distance(opt, sol, fn, spec) >= 2


def test_gadget_distance_without_indirect_branch(parse, isa):
    """No term can differ, so nothing satisfies the posted constraint."""
    fn = parse("func spin\nblock bb.0 freq=1\n  t1 <- li 1\n  beq t1, $r0, bb.0\n")
    model = build_model(fn, isa)
    opt = optimize(model).solution
    constrained = post_distance_constraint(model, opt, DistanceSpec(DistanceKind.GD))
    assert solve_next(constrained, SearchParams()) is None


def test_classify_transformations(bench):
    fn = bench("pair")
    a = SolutionAssignment((0, 1, 2), (0, 0, 0), (1, 2, 13), 3)
    assert classify_transformations(fn, a, a).total == 0

    swapped = SolutionAssignment((1, 0, 2), (0, 0, 0), (1, 2, 13), 3)
    assert classify_transformations(fn, a, swapped).as_dict() == {
        "nop_slots": 0, "copy_changes": 0, "reorderings": 1, "renamings": 0}

    padded = SolutionAssignment((0, 2, 3), (0, 0, 0), (5, 2, 13), 4)
    counts = classify_transformations(fn, a, padded)
    assert (counts.nop_slots, counts.reorderings, counts.renamings) == (1, 0, 1)


def test_mean_transformations_against_the_first(bench):
    fn = bench("pair")
    a = SolutionAssignment((0, 1, 2), (0, 0, 0), (1, 2, 13), 3)
    swapped = SolutionAssignment((1, 0, 2), (0, 0, 0), (1, 2, 13), 3)
    padded = SolutionAssignment((0, 2, 3), (0, 0, 0), (5, 2, 13), 4)
    assert mean_transformations(fn, [a, swapped, padded]) == {
        "nop_slots": 0.5, "copy_changes": 0.0, "reorderings": 0.5, "renamings": 0.5}
    assert all(np.isnan(v) for v in mean_transformations(fn, [a]).values())


def test_classify_copy_changes(bench, isa):
    fn = bench("factorial")
    opt = optimize(build_model(fn, isa)).solution
    impls = list(opt.impls)
    impls[0] = 1 - impls[0]
    other = SolutionAssignment(opt.cycles, tuple(impls), opt.regs, opt.cost)
    assert classify_transformations(fn, opt, other).copy_changes == 1
    with pytest.raises(DistanceError):
        classify_transformations(fn, opt, SolutionAssignment((0,), (0,), (), 1))
