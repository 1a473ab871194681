"""Tests for LNS, DLNS, random search and the max-diversity baseline."""
import pytest

from gadgetdiv.analysis.distances import DistanceKind, DistanceSpec, measure
from gadgetdiv.diversify import (Algorithm, DiversifyConfig, DLNSDiversifier, diversify, run_dlns, run_lns,
                                 run_maxdiv, run_rs, validate_variant_set)
from gadgetdiv.errors import ConfigError
from gadgetdiv.models import build_model
from gadgetdiv.models.enumeration import enumerate_solutions
from gadgetdiv.solver import optimize

from conftest import diversify_config

UNIQUE = """
func unique
block bb.0 freq=1
  $r2 <- li 1
  $r3 <- addi $r2, 1
  jr $r13
"""


@pytest.mark.parametrize("algo", ["lns", "maxdiv"])
def test_trio_is_exhausted_after_three_schedules(bench, isa, algo):
    """Three optimal schedules, Hamming distance only sees cycles."""
    fn = bench("trio")
    cfg = diversify_config(algo, k=10, p=0.0)
    variants = diversify(fn, isa, cfg)
    assert len(variants) == 3
    assert variants.reason == "exhausted"
    assert len({s.cycles for s in variants}) == 3
    assert validate_variant_set(fn, isa, variants, cfg.spec) == []


def test_unique_solution_gives_only_the_optimum(parse, isa):
    fn = parse(UNIQUE)
    variants = run_lns(fn, isa, diversify_config(k=5, p=0.0))
    assert len(variants) == 1
    assert variants.reason == "exhausted"
    assert variants.o == 3 and variants.bound == 3


def test_k_one_stops_at_the_optimum(bench, isa):
    variants = run_lns(bench("factorial"), isa, diversify_config(k=1))
    assert len(variants) == 1
    assert variants.reason == "k"
    assert variants.solutions[0].cost == 45


@pytest.mark.parametrize("kind", ["hd", "gd"])
def test_lns_variants_are_valid(bench, isa, kind):
    fn = bench("factorial")
    cfg = diversify_config(k=5, kind=kind)
    variants = run_lns(fn, isa, cfg)
    assert len(variants) == 5
    assert variants.reason == "k"
    assert variants.bound == 49
    assert validate_variant_set(fn, isa, variants, cfg.spec) == []
    assert variants.timestamps[0] == 0.0
    assert variants.timestamps == sorted(variants.timestamps)


def test_lns_is_deterministic(bench, isa):
    fn = bench("sum_loop")
    cfg = diversify_config(k=6, seed=11)
    first = run_lns(fn, isa, cfg)
    second = run_lns(fn, isa, cfg)
    assert first.solutions == second.solutions


def test_rs_keeps_distinct_variants(bench, isa):
    fn = bench("trio")
    cfg = diversify_config("rs", k=5, p=0.0)
    variants = run_rs(fn, isa, cfg)
    assert len(variants) == 5
    assert len({s.key for s in variants}) == 5
    assert validate_variant_set(fn, isa, variants, cfg.spec, check_distance=False) == []


def test_rs_stalls_on_a_unique_solution(parse, isa):
    variants = run_rs(parse(UNIQUE), isa, diversify_config("rs", k=5, p=0.0, stall_limit=5))
    assert len(variants) == 1
    assert variants.reason == "exhausted"


def test_rs_is_deterministic(bench, isa):
    fn = bench("factorial")
    cfg = diversify_config("rs", k=6, seed=4)
    assert run_rs(fn, isa, cfg).solutions == run_rs(fn, isa, cfg).solutions


def test_dlns_variants_are_valid(bench, isa):
    fn = bench("factorial")
    cfg = diversify_config("dlns", k=5, locals_per_block=3, workers=2)
    variants = run_dlns(fn, isa, cfg)
    assert 1 <= len(variants) <= 5
    assert variants.solutions[0].cost == 45
    assert validate_variant_set(fn, isa, variants, cfg.spec) == []


def test_dlns_single_block(bench, isa):
    """No global temps: every round keeps the empty global assignment."""
    fn = bench("trio")
    cfg = diversify_config("dlns", k=3, p=0.0)
    variants = run_dlns(fn, isa, cfg)
    assert len(variants) == 3
    assert validate_variant_set(fn, isa, variants, cfg.spec) == []


def test_dlns_combination_rejects_invalid_blocks(bench, isa):
    """Known, over-budget and register-clashing combinations leave the set unchanged."""
    fn = bench("factorial")
    div = DLNSDiversifier(fn, isa, diversify_config("dlns", k=5, p=0.0))
    div.initialize_model()
    model = div.base_model
    assert model.cost_bound == 45
    locals_ = [[{v: div.optimum_values[v] for v in model.block_vars(b.id)}] for b in fn.blocks]
    assert div.combine(div.globals, locals_, []) is None

    late = dict(locals_[2][0])
    for i in fn.block("bb.2").instructions:
        late[model.cycle_var(i)] += 1
    assert div.combine(div.globals, [locals_[0], locals_[1], [late]], []) is None

    clash = dict(locals_[1][0])
    clash[model.temp_var["t3"]] = div.globals[model.temp_var["t1"]]
    assert clash != locals_[1][0]
    assert div.combine(div.globals, [locals_[0], [clash], locals_[2]], []) is None
    assert div.variants.solutions == [div.optimum.solution]


@pytest.mark.parametrize("kind", ["hd", "gd"])
def test_maxdiv_variants_are_valid(bench, isa, kind):
    fn = bench("factorial")
    cfg = diversify_config("maxdiv", k=3, kind=kind)
    variants = run_maxdiv(fn, isa, cfg)
    assert len(variants) == 3
    assert validate_variant_set(fn, isa, variants, cfg.spec) == []


def test_maxdiv_second_variant_is_the_farthest(bench, isa):
    """The second variant reaches the largest distance any solution has from the optimum."""
    fn = bench("pair")
    cfg = diversify_config("maxdiv", k=2, p=0.0)
    variants = run_maxdiv(fn, isa, cfg)
    optimum, second = variants.solutions
    farthest = max(measure(optimum, s, fn, cfg.spec) for s in enumerate_solutions(fn, isa, variants.bound))
    assert farthest == 2
    assert measure(optimum, second, fn, cfg.spec) == farthest


def test_given_optimum_is_reused(bench, isa):
    fn = bench("factorial")
    optimum = optimize(build_model(fn, isa))
    variants = run_lns(fn, isa, diversify_config(k=2), optimum=optimum)
    assert variants.solutions[0] == optimum.solution


def test_validation_reports_problems(bench, isa):
    fn = bench("trio")
    cfg = diversify_config(k=3, p=0.0)
    variants = run_lns(fn, isa, cfg)
    variants.solutions.append(variants.solutions[1])
    problems = validate_variant_set(fn, isa, variants, cfg.spec)
    assert "variant set contains duplicates" in problems
    assert any("distance 0" in p for p in problems)


@pytest.mark.parametrize("kwargs", [
    {"k": 0},
    {"p": -0.5},
    {"algorithm": "annealing"},
    {"global_relax_rate": 2.0},
    {"locals_per_block": 0},
    {"combine_attempts": 0},
])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        DiversifyConfig(**kwargs)


def test_config_accepts_strings():
    cfg = DiversifyConfig(algorithm="MaxDiv", spec=DistanceSpec("gd"))
    assert cfg.algorithm is Algorithm.MAXDIV
    assert cfg.spec.kind is DistanceKind.GD
