"""Shared fixtures: the default ISA table and the bundled benchmark functions."""
from dataclasses import replace

import pytest

from gadgetdiv.analysis.distances import DistanceKind, DistanceSpec
from gadgetdiv.diversify import Algorithm, DiversifyConfig
from gadgetdiv.harness.suite import BenchmarkSuite
from gadgetdiv.ir import default_isa, parse_function
from gadgetdiv.solver.search import SearchParams

TOY_IDS = ["tiny", "pair", "chain3", "trio", "twoblock", "factorial", "sum_loop"]


@pytest.fixture(scope="session")
def isa():
    return default_isa()


@pytest.fixture(scope="session")
def suite():
    return BenchmarkSuite.load()


@pytest.fixture(scope="session")
def bench(suite, isa):
    """Load a bundled function by id: ``bench("factorial")``."""
    cache = {}

    def load(bench_id):
        if bench_id not in cache:
            cache[bench_id] = suite.get(bench_id).load(isa)
        return cache[bench_id]
    return load


@pytest.fixture
def parse(isa):
    def parse_text(text):
        return parse_function(text, isa)
    return parse_text


def diversify_config(algo="lns", k=5, p=0.10, kind="hd", h=1, n_r=0, n_c=8, seed=0,
                     time_limit=20.0, **extra):
    """Small, fast configuration for tests."""
    return DiversifyConfig(
        algorithm=Algorithm(algo),
        k=k,
        p=p,
        spec=DistanceSpec(DistanceKind(kind), h, n_r, n_c),
        search=replace(SearchParams(), seed=seed, time_limit=time_limit),
        **extra,
    )
