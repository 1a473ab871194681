"""Tests for the constraint model, the cost function and the independent validator."""
from dataclasses import replace

import pytest

from gadgetdiv.errors import IncompleteSolutionError, ModelError
from gadgetdiv.models import (SolutionAssignment, build_model, check_solution, evaluate_cost,
                              gap_bound, makespans, post_gap_constraint)
from gadgetdiv.models.enumeration import enumerate_schedules, minimum_cost
from gadgetdiv.solver import optimize
from gadgetdiv.solver.space import values_of

LONE_BRANCH = """
func lone
block a freq=1 -> b
  t1 <- li 1
  b b
block b freq=1
  jr $r13
"""


def test_variable_numbering(bench, isa):
    """c_i = i, m_i = n + i and one register variable per temp after them."""
    fn = bench("factorial")
    model = build_model(fn, isa)
    assert model.num_vars == 2 * 9 + 3
    assert model.cycle_var(4) == 4 and model.impl_var(4) == 13
    assert model.temp_var == {"t1": 18, "t2": 19, "t3": 20}
    assert [model.kind(v) for v in (0, 9, 18)] == ["c", "m", "r"]
    assert model.global_vars == (18, 19)
    assert model.block_vars("bb.1") == (3, 4, 5, 6, 12, 13, 14, 15, 20)


def test_domains(bench, isa):
    fn = bench("factorial")
    model = build_model(fn, isa)
    assert model.horizons == (6, 9, 4)
    # copy has two implementations, everything else one
    assert list(values_of(model.domains[model.impl_var(0)])) == [0, 1]
    assert list(values_of(model.domains[model.impl_var(1)])) == [0]
    # temps avoid the reserved registers and those the function names itself
    assert list(values_of(model.domains[18])) == [1, 3, 5, 6, 7, 8, 9, 10, 11, 12]
    # branches issue last
    assert min(values_of(model.domains[6])) == 3


def test_lone_branch_domain(parse, isa):
    model = build_model(parse(LONE_BRANCH), isa)
    assert list(values_of(model.domains[2])) == [0]


def test_evaluate_cost(bench):
    """Makespans (2, 4, 1) under frequencies (1, 10, 1) cost 3 + 50 + 2."""
    fn = bench("factorial")
    cycles = (0, 1, 2, 0, 1, 2, 4, 0, 1)
    sol = SolutionAssignment(cycles, (0,) * 9, (0,) * len(fn.operands), 0)
    assert makespans(fn, cycles) == [2, 4, 1]
    assert evaluate_cost(fn, sol) == 55


def test_evaluate_cost_incomplete(bench):
    with pytest.raises(IncompleteSolutionError):
        makespans(bench("factorial"), (0, 1, 2))


@pytest.mark.parametrize("o, p, bound", [
    (55, 0.10, 60),
    (55, 0.20, 66),
    (45, 0.10, 49),
    (45, 0.0, 45),
    (4, 0.5, 6),
])
def test_gap_bound(o, p, bound):
    assert gap_bound(o, p) == bound


def test_gap_bound_rejects_negative_gap():
    with pytest.raises(ModelError):
        gap_bound(10, -0.1)


def test_post_gap_constraint(bench, isa):
    model = build_model(bench("factorial"), isa)
    assert model.cost_bound is None
    bounded = post_gap_constraint(model, 45, 0.10)
    assert bounded.cost_bound == 49
    assert model.cost_bound is None
    # a looser gap never widens an existing bound
    assert post_gap_constraint(bounded, 45, 0.50).cost_bound == 49


def test_pair_has_two_optimal_schedules(bench, isa):
    fn = bench("pair")
    assert minimum_cost(fn, isa) == 3
    schedules = enumerate_schedules(fn, isa, bound=3)
    assert sorted(cycles for cycles, _ in schedules) == [(0, 1, 2), (1, 0, 2)]


def test_too_few_registers(bench, isa):
    """t1 and t2 are live together in the loop, one register cannot hold both."""
    narrow = replace(isa, allocatable=(1,))
    with pytest.raises(ModelError):
        build_model(bench("factorial"), narrow)


def test_no_register_left(parse, isa):
    fn = parse("func f\nblock bb.0 freq=1\n  t1 <- addi $r1, 1\n  jr $r13\n")
    with pytest.raises(ModelError):
        build_model(fn, replace(isa, allocatable=(1,)))


def test_solution_values_round_trip(bench, isa):
    fn = bench("factorial")
    model = build_model(fn, isa)
    opt = optimize(model).solution
    assert model.solution_from_values(model.values_from_solution(opt)) == opt


def test_solution_record_round_trip():
    sol = SolutionAssignment((0, 1, 2), (0, 0, 0), (2, 3, 13), 3)
    record = sol.to_record(4)
    assert record["variant"] == 4
    assert SolutionAssignment.from_record(record) == sol
    with pytest.raises(IncompleteSolutionError):
        SolutionAssignment.from_record({"cycles": [0]})


def test_validator_accepts_the_optimum(bench, isa):
    fn = bench("factorial")
    opt = optimize(build_model(fn, isa))
    assert opt.cost == 45
    assert check_solution(fn, isa, opt.solution, bound=45) == []


def test_validator_catches_mutations(bench, isa):
    fn = bench("factorial")
    model = build_model(fn, isa)
    opt = optimize(model).solution

    # t1 and t2 forced into one register
    values = model.values_from_solution(opt)
    values[model.temp_var["t2"]] = values[model.temp_var["t1"]]
    merged = model.solution_from_values(values)
    assert any("live together" in p for p in check_solution(fn, isa, merged))

    # beq issued before the slti that feeds it
    values = model.values_from_solution(opt)
    values[4], values[6] = values[6], values[4]
    swapped = model.solution_from_values(values)
    assert check_solution(fn, isa, swapped)

    # a fixed register renamed
    regs = list(opt.regs)
    regs[-1] = 12
    assert any("fixed register" in p for p in check_solution(fn, isa, replace(opt, regs=tuple(regs))))

    # recorded cost out of date
    assert any("recorded cost" in p for p in check_solution(fn, isa, replace(opt, cost=44)))

    # over the bound
    assert any("exceeds the bound" in p for p in check_solution(fn, isa, opt, bound=44))

    assert check_solution(fn, isa, replace(opt, cycles=opt.cycles[:-1])) == [
        "solution shape does not match the function"]
