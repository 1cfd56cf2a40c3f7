"""Shared instance builders for the test suite."""

from __future__ import annotations

from itertools import chain, combinations

import numpy as np
import pytest

from submemo.bench import gen_synthetic
from submemo.functions import make_function

# every zoo class reachable through the synthetic generator
ALL_KINDS = (
    "faclocation",
    "satcov",
    "graphcut",
    "setcover",
    "clustersetcover",
    "probsetcover",
    "featurebased",
    "clusterconcave",
    "logdet",
    "dispmin",
    "dispsum",
    "dispminsum",
    "modular",
    "mixture",
    "deep2",
)

# the table classes the oracle-equivalence acceptance criterion enumerates
TABLE_KINDS = tuple(k for k in ALL_KINDS if k not in ("modular", "mixture", "deep2")) + ("deep2",)

# diminishing returns holds; dispersion min/sum/min-sum all fail it
SUBMODULAR_KINDS = (
    "faclocation",
    "satcov",
    "graphcut",
    "setcover",
    "clustersetcover",
    "probsetcover",
    "featurebased",
    "clusterconcave",
    "logdet",
    "modular",
    "mixture",
    "deep2",
)

MONOTONE_KINDS = (
    "faclocation",
    "satcov",
    "setcover",
    "clustersetcover",
    "probsetcover",
    "featurebased",
    "clusterconcave",
    "deep2",
    "dispsum",
)


def zoo_instance(kind: str, n: int, seed: int = 0, params: dict | None = None):
    data = gen_synthetic(kind, n, seed, params)
    return make_function(n, data)


def powerset(n: int):
    return chain.from_iterable(combinations(range(n), r) for r in range(n + 1))


def all_values(F) -> dict:
    """Exhaustive from-scratch value table keyed by sorted member tuples."""
    return {S: F.evaluate(S) for S in powerset(F.n)}


def random_subset(rng, n: int, max_size: int | None = None) -> list:
    hi = n if max_size is None else min(max_size, n)
    size = int(rng.integers(0, hi + 1))
    if size == 0:
        return []
    return sorted(int(j) for j in rng.choice(n, size=size, replace=False))


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
