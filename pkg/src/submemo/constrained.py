"""Submodular-constrained and difference-of-submodular procedures.

Both problem families are solved by iterating tight modular replacements:
cover/knapsack rounds swap the cost function for one of its two upper
bounds and keep the better outcome; difference minimization swaps one (or
both) sides per the chosen variant.  All function access goes through the
bounds/maximize/minimize primitives, so memoized runs stay oracle-free.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import subgradient_at, supergradient_grow, supergradient_shrink
from .core import (
    ABS_TOL,
    InputError,
    ModularFunction,
    NonConvergenceError,
    Subset,
    SubmodularFunction,
    tol_for,
)
from .functions.compose import ModularPenalizedFunction
from .maximize import Knapsack, greedy_lazy, local_search_usm
from .minimize import min_norm_point

_COST_FLOOR = 1e-12


@dataclass
class ScProblem:
    """Coupled pair: minimize f with a floor on g (SCSC) or maximize g with a
    ceiling on f (SCSK)."""

    f: SubmodularFunction
    g: SubmodularFunction
    direction: str
    c: float | None = None
    b: float | None = None

    def __post_init__(self):
        if self.direction not in ("SCSC", "SCSK"):
            raise InputError("direction must be 'SCSC' or 'SCSK'")
        if self.f.n != self.g.n:
            raise InputError("f and g must share the ground set")
        if self.direction == "SCSC" and self.c is None:
            raise InputError("SCSC needs the cover level c")
        if self.direction == "SCSK" and self.b is None:
            raise InputError("SCSK needs the budget b")


@dataclass
class DsProblem:
    """Minimize f - g for submodular f and g."""

    f: SubmodularFunction
    g: SubmodularFunction
    variant: str = "mod-mod"

    def __post_init__(self):
        if self.variant not in ("sub-sup", "sup-sub", "mod-mod"):
            raise InputError("variant must be 'sub-sup', 'sup-sub' or 'mod-mod'")
        if self.f.n != self.g.n:
            raise InputError("f and g must share the ground set")


@dataclass
class IterativeResult:
    selected: Subset
    objective: float
    constraint_value: float | None
    trace: list
    iterations: int
    converged: bool
    stats: dict = field(default_factory=dict)

    @property
    def members(self) -> list:
        return self.selected.members


def _memo_value(F: SubmodularFunction, members) -> float:
    F.set_memo(members)
    return F.memo_value()


def submodular_set_cover(
    g: SubmodularFunction, cost, c: float, pool=None
) -> IterativeResult:
    """Lazy cost-ratio greedy cover: grow until g reaches the level c.

    ``cost`` is a ModularFunction or a weight array; non-positive costs are
    floored at a tiny epsilon for the ratio rule.  Requires g monotone with
    g(V) >= c (checked), so progress is always available.
    """
    n = g.n
    weights = cost.weights if isinstance(cost, ModularFunction) else np.asarray(cost, float)
    if weights.shape != (n,):
        raise InputError("need one cost per element")
    costs = np.maximum(weights, _COST_FLOOR)
    pool = list(range(n)) if pool is None else sorted(pool)
    total = _memo_value(g, pool)
    tol = tol_for(max(1.0, abs(c)))
    if total < c - tol:
        raise InputError(f"cover level {c} infeasible: g over the pool is {total}")
    g.set_memo(())
    covered = g.memo_value()
    heap = []
    for j in pool:
        gain = g.gain_add(j)
        heap.append((-gain / costs[j], j, len(g.memo), gain))
    heapq.heapify(heap)
    trace = []
    spent = 0.0
    while covered < c - tol and heap:
        negratio, j, stamp, gain = heapq.heappop(heap)
        if stamp != len(g.memo):
            gain = g.gain_add(j)
            entry = (-gain / costs[j], j, len(g.memo), gain)
            if heap and entry >= heap[0]:
                heapq.heappush(heap, entry)
                continue
        if gain <= ABS_TOL:
            continue  # zero gain cannot make progress; try the rest
        g.update(j)
        covered += gain
        spent += float(weights[j])
        trace.append((j, gain))
    covered = g.memo_value()
    return IterativeResult(
        selected=g.memo.copy(),
        objective=spent,
        constraint_value=covered,
        trace=trace,
        iterations=len(trace),
        converged=covered >= c - tol,
        stats={"cost_floored": bool(np.any(weights < _COST_FLOOR))},
    )


def _both_supergradients(F: SubmodularFunction, X):
    return (supergradient_grow(F, X), supergradient_shrink(F, X))


def scsc_solve(p: ScProblem, max_iters: int = 50) -> IterativeResult:
    """Minimize f subject to g(X) >= c by iterated upper-bound covers.

    Each round replaces f by both tight upper bounds at the incumbent,
    solves the resulting modular-cost cover, and keeps the better feasible
    candidate; the best feasible iterate never worsens.
    """
    if p.direction != "SCSC":
        raise InputError("scsc_solve needs an SCSC problem")
    f, g, c = p.f, p.g, p.c
    current: list[int] = []
    seen = set()
    trace = []
    best_members, best_obj = None, math.inf
    converged = False
    for _ in range(max_iters):
        key = frozenset(current)
        if key in seen:
            converged = True
            break
        seen.add(key)
        candidates = []
        for bound in _both_supergradients(f, current):
            cover = submodular_set_cover(g, np.maximum(bound.weights, _COST_FLOOR), c)
            cand = cover.members
            candidates.append((_memo_value(f, cand), cand))
        obj, current = min(candidates, key=lambda t: (t[0], t[1]))
        trace.append(obj)
        if obj < best_obj:
            best_obj, best_members = obj, list(current)
    sel = Subset(f.n, best_members or [])
    return IterativeResult(
        selected=sel,
        objective=best_obj,
        constraint_value=_memo_value(g, sel.members),
        trace=trace,
        iterations=len(trace),
        converged=converged,
    )


def scsk_solve(p: ScProblem, max_iters: int = 50) -> IterativeResult:
    """Maximize g subject to f(X) <= b by iterated upper-bound knapsacks.

    The knapsack costs are a tight upper bound on f, so every iterate is
    feasible for the true constraint.  Returns the empty set when no single
    element fits the budget.
    """
    if p.direction != "SCSK":
        raise InputError("scsk_solve needs an SCSK problem")
    f, g, b = p.f, p.g, p.b
    current: list[int] = []
    seen = set()
    trace = []
    best_members, best_obj = [], -math.inf
    converged = False
    for _ in range(max_iters):
        key = frozenset(current)
        if key in seen:
            converged = True
            break
        seen.add(key)
        candidates = []
        for bound in _both_supergradients(f, current):
            slack = b - bound.offset
            costs = np.maximum(bound.weights, _COST_FLOOR)
            if slack <= 0 or not np.any(costs <= slack):
                candidates.append((0.0, []))
                continue
            res = greedy_lazy(g, Knapsack(tuple(costs), slack))
            candidates.append((res.value, res.members))
        obj, current = max(candidates, key=lambda t: t[0])
        trace.append(obj)
        if obj > best_obj:
            best_obj, best_members = obj, list(current)
    if best_obj == -math.inf:
        best_members, best_obj = [], _memo_value(g, [])
    sel = Subset(f.n, best_members)
    return IterativeResult(
        selected=sel,
        objective=best_obj,
        constraint_value=_memo_value(f, sel.members),
        trace=trace,
        iterations=len(trace),
        converged=converged,
    )


def ds_minimize(
    p: DsProblem, seed: int = 0, max_iters: int = 50
) -> IterativeResult:
    """Difference minimization min f - g by modular replacement rounds.

    Variants: 'sub-sup' keeps f and lower-bounds g (each round is a
    submodular minimization via the norm-point solver); 'sup-sub'
    upper-bounds f and keeps g (each round is unconstrained maximization by
    local search warm-started at the incumbent); 'mod-mod' replaces both
    (exact modular minimization).  The objective never increases; hitting
    the iteration cap returns the best iterate flagged unconverged.
    """
    f, g = p.f, p.g
    n = f.n

    def objective(members) -> float:
        return _memo_value(f, members) - _memo_value(g, members)

    current: list[int] = []
    obj = objective(current)
    trace = [obj]
    seen = {frozenset()}
    best_members, best_obj = list(current), obj
    converged = False
    for _ in range(max_iters):
        candidates = []
        if p.variant == "sub-sup":
            h = subgradient_at(g, current)
            shifted = ModularPenalizedFunction(f.clone_detached(), h.weights)
            try:
                res = min_norm_point(shifted, tol=1e-9)
            except NonConvergenceError as err:
                res = err.result
            for cand in (res.minimizer_min.members, res.minimizer_max.members):
                candidates.append((objective(cand), sorted(cand)))
        elif p.variant == "sup-sub":
            for bound in _both_supergradients(f, current):
                shifted = ModularPenalizedFunction(g.clone_detached(), bound.weights)
                res = local_search_usm(shifted, start=current)
                cand = res.members
                candidates.append((objective(cand), sorted(cand)))
        else:  # mod-mod
            h = subgradient_at(g, current)
            for bound in _both_supergradients(f, current):
                net = bound.weights - h.weights
                cand = sorted(int(j) for j in np.flatnonzero(net < 0.0))
                candidates.append((objective(cand), cand))
        cand_obj, cand = min(candidates, key=lambda t: (t[0], t[1]))
        if cand_obj > obj + ABS_TOL:
            converged = True  # replacement could not improve; incumbent is locally tight
            break
        current, obj = cand, cand_obj
        trace.append(obj)
        if obj < best_obj:
            best_obj, best_members = obj, list(cand)
        key = frozenset(current)
        if key in seen:
            converged = True
            break
        seen.add(key)
    sel = Subset(n, best_members)
    return IterativeResult(
        selected=sel,
        objective=best_obj,
        constraint_value=None,
        trace=trace,
        iterations=len(trace) - 1,
        converged=converged,
        stats={"variant": p.variant, "seed": seed},
    )
