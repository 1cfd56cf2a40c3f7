"""Exhaustive optimization oracles for small ground sets.

These are the independent reference for every approximation-ratio check:
they enumerate feasible sets and evaluate each from scratch.  Hard-capped
at n = 20.
"""

from __future__ import annotations

import math
from itertools import combinations

from ..core import InputError, Subset, SubmodularFunction
from ..maximize import Cardinality, Constraint, Knapsack

BRUTE_FORCE_CAP = 20


def _check_cap(F: SubmodularFunction) -> None:
    if F.n > BRUTE_FORCE_CAP:
        raise InputError(f"brute force capped at n={BRUTE_FORCE_CAP}, got {F.n}")


def brute_force_max(F: SubmodularFunction, c: Constraint):
    """Exhaustive constrained maximum; ties go to the lexicographically
    smallest member tuple (which enumeration order guarantees)."""
    _check_cap(F)
    best_members, best_value = (), F.evaluate(())
    if isinstance(c, Cardinality):
        sizes = range(1, min(c.k, F.n) + 1)

        def feasible(members):
            return True

    elif isinstance(c, Knapsack):
        sizes = range(1, F.n + 1)

        def feasible(members):
            return c.cost(members) <= c.budget + 1e-12

    else:
        raise InputError(f"unknown constraint {c!r}")
    for size in sizes:
        for members in combinations(range(F.n), size):
            if not feasible(members):
                continue
            v = F.evaluate(members)
            if v > best_value:
                best_members, best_value = members, v
    return Subset(F.n, best_members), best_value


def brute_force_min(F: SubmodularFunction):
    """Exhaustive unconstrained minimum with the same tie rule."""
    _check_cap(F)
    best_members, best_value = (), F.evaluate(())
    for size in range(1, F.n + 1):
        for members in combinations(range(F.n), size):
            v = F.evaluate(members)
            if v < best_value:
                best_members, best_value = members, v
    return Subset(F.n, best_members), best_value


def brute_force_min_over(F: SubmodularFunction, family) -> tuple:
    """Exhaustive minimum over an iterable of candidate member tuples."""
    _check_cap(F)
    best_members, best_value = None, math.inf
    for members in family:
        v = F.evaluate(tuple(members))
        if v < best_value:
            best_members, best_value = tuple(members), v
    if best_members is None:
        raise InputError("empty candidate family")
    return Subset(F.n, best_members), best_value
