"""Tests for the search engine: optimality against enumeration, first solutions, relaxation."""
import random
from dataclasses import replace

import pytest

from gadgetdiv.analysis.distances import DistanceSpec, post_distance_constraint
from gadgetdiv.errors import ConfigError, InfeasibleError, SolverTimeoutError
from gadgetdiv.models import build_model, check_solution
from gadgetdiv.models.enumeration import minimum_cost
from gadgetdiv.solver import (Branching, SearchEngine, SearchParams, ValueMemory, optimize, propagate,
                              relax, relax_values, solve_next)

from conftest import TOY_IDS


@pytest.mark.parametrize("bench_id", TOY_IDS)
def test_optimize_matches_enumeration(bench, isa, bench_id):
    """Branch-and-bound proves the same optimum as exhaustive enumeration."""
    fn = bench(bench_id)
    result = optimize(build_model(fn, isa))
    assert result.proven
    assert result.cost == minimum_cost(fn, isa)
    assert check_solution(fn, isa, result.solution, bound=result.cost) == []


@pytest.mark.parametrize("bench_id, cost", [("tiny", 2), ("pair", 3), ("chain3", 3), ("trio", 4),
                                            ("factorial", 45)])
def test_known_optima(bench, isa, bench_id, cost):
    assert optimize(build_model(bench(bench_id), isa)).cost == cost


def test_single_instruction_function(parse, isa):
    fn = parse("func ret\nblock bb.0 freq=1\n  jr $r13\n")
    result = optimize(build_model(fn, isa))
    assert result.cost == 1
    assert result.solution.cycles == (0,)


def test_optimize_is_deterministic(bench, isa):
    model = build_model(bench("sum_loop"), isa)
    params = SearchParams(seed=3)
    assert optimize(model, params) == optimize(model, params)


def test_optimize_infeasible_bound(bench, isa):
    model = build_model(bench("pair"), isa).with_cost_bound(2)
    with pytest.raises(InfeasibleError):
        optimize(model)


def test_optimize_timeout_without_solution(bench, isa):
    model = build_model(bench("codec_frame"), isa)
    with pytest.raises(SolverTimeoutError):
        optimize(model, SearchParams(time_limit=1e-9))


def test_root_propagation(bench, isa):
    """li -> addi -> jr: each instruction waits one cycle for the previous one."""
    model = build_model(bench("chain3"), isa)
    space = model.root_space()
    assert propagate(space, model, range(len(model.propagators)))
    assert [space.lb(v) for v in model.cycle_vars] == [0, 1, 2]


def test_propagation_reaches_a_fixpoint(bench, isa):
    model = build_model(bench("factorial"), isa).with_cost_bound(45)
    space = model.root_space()
    assert propagate(space, model, range(len(model.propagators)))
    before = list(space.doms)
    assert propagate(space, model, range(len(model.propagators)))
    assert space.doms == before
    # at the optimum every branch sits at its minimum makespan
    assert [space.ub(b.branch) for b in model.fn.blocks] == [2, 3, 1]


@pytest.mark.parametrize("branching", list(Branching))
def test_solve_next_respects_the_bound(bench, isa, branching):
    fn = bench("factorial")
    model = build_model(fn, isa).with_cost_bound(49)
    params = SearchParams(branching=branching, seed=1)
    sol = solve_next(model, params)
    assert sol is not None
    assert check_solution(fn, isa, sol, bound=49) == []


def test_solve_next_exhausts_pair(bench, isa):
    """Two schedules at cost 3: a Hamming constraint per solution leaves nothing after two."""
    fn = bench("pair")
    model = build_model(fn, isa).with_cost_bound(3)
    params = SearchParams(seed=0)
    found = []
    while True:
        sol = solve_next(model, params, rng=random.Random(len(found)))
        if sol is None:
            break
        found.append(sol)
        model = post_distance_constraint(model, sol, DistanceSpec())
    assert sorted(s.cycles for s in found) == [(0, 1, 2), (1, 0, 2)]


def test_solve_next_none_when_infeasible(bench, isa):
    model = build_model(bench("pair"), isa).with_cost_bound(2)
    assert solve_next(model, SearchParams()) is None


def test_search_engine_counts(bench, isa):
    model = build_model(bench("trio"), isa).with_cost_bound(4)
    engine = SearchEngine(model, SearchParams(branching=Branching.ORIGINAL))
    status, space = engine.search()
    assert status.value == "solution"
    assert engine.nodes > 0
    assert model.solution_from_space(space).cost == 4


def test_relax_extremes(bench, isa):
    fn = bench("factorial")
    model = build_model(fn, isa)
    opt = optimize(model).solution
    kept = relax(opt, model, 0.0, random.Random(0))
    assert kept.relaxed == ()
    assert kept.fixed == dict(enumerate(model.values_from_solution(opt)))
    freed = relax(opt, model, 1.0, random.Random(0))
    assert freed.fixed == {}
    assert freed.relaxed == tuple(range(model.num_vars))


def test_relax_is_seeded(bench, isa):
    fn = bench("sum_loop")
    model = build_model(fn, isa)
    opt = optimize(model).solution
    first = relax(opt, model, 0.5, random.Random(7))
    second = relax(opt, model, 0.5, random.Random(7))
    assert first == second
    assert set(first.fixed) | set(first.relaxed) == set(range(model.num_vars))
    assert not set(first.fixed) & set(first.relaxed)


def test_relax_values_subset():
    values = {0: 3, 1: 4, 2: 5, 7: 1}
    partial = relax_values(values, 0.0, random.Random(0), [1, 7])
    assert partial.fixed == {1: 4, 7: 1}


def test_relax_rate_frees_its_share_of_variables():
    """Over many trials the relaxed fraction matches the rate."""
    rng = random.Random(5)
    values = {v: 0 for v in range(10)}
    freed = [len(relax_values(values, 0.6, rng, list(values)).relaxed) for _ in range(1000)]
    assert abs(sum(freed) / len(freed) - 6.0) <= 0.5


def test_value_memory_prefers_unused_values():
    memory = ValueMemory()
    assert memory.least_used(3, [1, 2, 3]) == [1, 2, 3]
    memory.record({3: 1, 4: 7})
    memory.record({3: 2})
    assert memory.least_used(3, [1, 2, 3]) == [3]
    assert memory.least_used(3, [1, 2]) == [1, 2]
    assert memory.least_used(4, [7, 8]) == [8]
    assert memory.least_used(5, [0, 1]) == [0, 1]


def test_random_branching_with_memory_takes_unused_values(bench, isa):
    fn = bench("trio")
    model = build_model(fn, isa).with_cost_bound(4)
    space = model.root_space()
    memory = ValueMemory()
    memory.record({v: space.values(v)[0] for v in range(model.num_vars) if not space.is_fixed(v)})
    engine = SearchEngine(model, SearchParams(branching=Branching.RANDOM, seed=1), rng=random.Random(1),
                          memory=memory)
    for _ in range(20):
        var, value = engine._select(space)
        assert value != space.values(var)[0]
    status, found = engine.search(None, failure_limit=None)
    assert check_solution(fn, isa, model.solution_from_space(found), bound=4) == []


@pytest.mark.parametrize("kwargs", [
    {"relax_rate": 1.5},
    {"relax_rate": -0.1},
    {"failure_limit": 0},
    {"time_limit": 0},
])
def test_search_params_validation(kwargs):
    with pytest.raises(ConfigError):
        SearchParams(**kwargs)


def test_optimize_ignores_requested_branching(bench, isa):
    model = build_model(bench("trio"), isa)
    a = optimize(model, SearchParams(branching=Branching.RANDOM, seed=2))
    b = optimize(model, replace(SearchParams(seed=2), branching=Branching.ORIGINAL))
    assert a == b
