"""Maximization algorithms, all consuming gains through the memo contract.

Every argmax breaks ties toward the smallest element id, and every
randomized routine takes an explicit seed, so paired runs (lazy vs naive,
PM vs VO) are exactly reproducible.  None of the algorithms ever calls
``evaluate``: reported values come from the live statistic, so memoized
runs finish with zero oracle evaluations.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import check_permutation, extreme_point
from .core import (
    ABS_TOL,
    EvalCounters,
    InputError,
    Subset,
    SubmodularFunction,
    as_subset,
)


@dataclass(frozen=True)
class Cardinality:
    """At most k elements."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise InputError(f"cardinality limit must be >= 1, got {self.k}")


@dataclass(frozen=True)
class Knapsack:
    """Per-element positive costs and a budget."""

    costs: tuple
    budget: float

    def __post_init__(self):
        costs = np.asarray(self.costs, dtype=float)
        if costs.ndim != 1 or np.any(costs <= 0) or not np.all(np.isfinite(costs)):
            raise InputError("knapsack costs must be finite and positive")
        object.__setattr__(self, "costs", costs)
        if not np.isfinite(self.budget) or self.budget <= 0:
            raise InputError("knapsack budget must be finite and positive")

    def cost(self, members) -> float:
        return float(self.costs[list(members)].sum())


Constraint = Cardinality | Knapsack


@dataclass
class MaximizationResult:
    selected: Subset
    value: float
    counters: object
    trace: list = field(default_factory=list)
    seed: int | None = None
    stats: dict = field(default_factory=dict)

    @property
    def members(self) -> list:
        return self.selected.members


def _validate_constraint(F: SubmodularFunction, c: Constraint) -> None:
    if isinstance(c, Cardinality):
        if c.k > F.n:
            raise InputError(f"cardinality {c.k} exceeds ground set size {F.n}")
    elif isinstance(c, Knapsack):
        if c.costs.shape != (F.n,):
            raise InputError("need one knapsack cost per element")
        if not np.any(c.costs <= c.budget):
            raise InputError("no element fits the knapsack budget")
    else:
        raise InputError(f"unknown constraint {c!r}")


def _result(F, trace, seed=None, stats=None) -> MaximizationResult:
    return MaximizationResult(
        selected=F.memo.copy(),
        value=F.memo_value(),
        counters=F.counters.copy(),
        trace=trace,
        seed=seed,
        stats=stats or {},
    )


def _best_singleton_swap(F, c: Knapsack, pool, result: MaximizationResult) -> MaximizationResult:
    """Knapsack post-step: the better of ratio-greedy and the best feasible singleton."""
    best_j, best_v = None, -math.inf
    for j in pool:
        if c.costs[j] <= c.budget:
            v = F.gain_singleton(j)
            if v > best_v:
                best_j, best_v = j, v
    if best_j is not None and best_v > result.value + ABS_TOL:
        F.set_memo([best_j])
        return _result(F, [(best_j, best_v)], result.seed, result.stats)
    return result


def greedy_naive(F: SubmodularFunction, c: Constraint, pool=None) -> MaximizationResult:
    """Plain greedy: add the feasible element of best gain until saturated.

    Under a knapsack the selection rule is the gain/cost ratio and the final
    answer is the better of the ratio-greedy set and the best feasible
    singleton.
    """
    _validate_constraint(F, c)
    pool = list(range(F.n)) if pool is None else sorted(pool)
    F.set_memo(())
    trace = []
    knapsack = isinstance(c, Knapsack)
    spent = 0.0
    while True:
        if not knapsack and len(F.memo) >= c.k:
            break
        best_j, best_gain, best_key = None, None, -math.inf
        for j in pool:
            if j in F.memo:
                continue
            if knapsack and c.costs[j] > c.budget - spent + ABS_TOL:
                continue
            g = F.gain_add(j)
            key = g / c.costs[j] if knapsack else g
            if key > best_key:
                best_j, best_gain, best_key = j, g, key
        if best_j is None or best_gain <= -ABS_TOL:
            break
        F.update(best_j)
        trace.append((best_j, best_gain))
        if knapsack:
            spent += c.costs[best_j]
    res = _result(F, trace)
    if knapsack:
        res = _best_singleton_swap(F, c, pool, res)
    return res


def greedy_lazy(F: SubmodularFunction, c: Constraint, pool=None) -> MaximizationResult:
    """Accelerated greedy with a stale-bound priority queue.

    Queue entries carry the memo size at which their bound was computed;
    a popped entry that is already current is accepted, otherwise it is
    recomputed and either accepted immediately (when it still beats the
    next head under the (gain, id) order) or pushed back.  Output matches
    greedy_naive exactly under the deterministic tie rule.
    """
    _validate_constraint(F, c)
    pool = list(range(F.n)) if pool is None else sorted(pool)
    F.set_memo(())
    knapsack = isinstance(c, Knapsack)
    spent = 0.0
    trace = []
    recomputes = []

    def key_of(gain, j):
        return gain / c.costs[j] if knapsack else gain

    heap = []
    for j in pool:
        g = F.gain_add(j)
        heap.append((-key_of(g, j), j, len(F.memo), g))
    heapq.heapify(heap)
    recomputes.append(len(pool))

    round_recomputes = 0
    while heap:
        if not knapsack and len(F.memo) >= c.k:
            break
        negkey, j, stamp, g = heapq.heappop(heap)
        if knapsack and c.costs[j] > c.budget - spent + ABS_TOL:
            continue  # budget only shrinks; j never fits again
        if stamp != len(F.memo):
            g = F.gain_add(j)
            round_recomputes += 1
            entry = (-key_of(g, j), j, len(F.memo), g)
            if heap and entry >= heap[0]:
                heapq.heappush(heap, entry)
                continue
        if g <= -ABS_TOL:
            break
        F.update(j)
        trace.append((j, g))
        recomputes.append(round_recomputes)
        round_recomputes = 0
        if knapsack:
            spent += c.costs[j]
    res = _result(F, trace, stats={"recomputes_per_round": recomputes})
    if knapsack:
        res = _best_singleton_swap(F, c, pool, res)
    return res


def greedy_stochastic(
    F: SubmodularFunction, k: int, eps: float = 0.1, seed: int = 0, pool=None
) -> MaximizationResult:
    """Lazier-than-lazy greedy: per step, best gain within a random sample.

    The sample has ceil((n/k) * ln(1/eps)) elements drawn uniformly without
    replacement from the unselected pool.
    """
    _validate_constraint(F, Cardinality(k))
    if not 0.0 < eps < 1.0:
        raise InputError("eps must lie in (0, 1)")
    pool = list(range(F.n)) if pool is None else sorted(pool)
    rng = np.random.default_rng(seed)
    sample_size = math.ceil((F.n / k) * math.log(1.0 / eps))
    F.set_memo(())
    trace = []
    for _ in range(min(k, len(pool))):
        remaining = [j for j in pool if j not in F.memo]
        if not remaining:
            break
        take = min(sample_size, len(remaining))
        sample = sorted(rng.choice(len(remaining), size=take, replace=False))
        best_j, best_g = None, -math.inf
        for pos in sample:
            j = remaining[pos]
            g = F.gain_add(j)
            if g > best_g:
                best_j, best_g = j, g
        F.update(best_j)
        trace.append((best_j, best_g))
    return _result(F, trace, seed=seed)


def sieve_streaming(
    F: SubmodularFunction, k: int, eps: float = 0.1, stream=None
) -> MaximizationResult:
    """Single-pass streaming maximization with a geometric threshold grid.

    A detached clone (own statistic) lives per active threshold v; element e
    joins v's set when the set is below k and the gain clears
    (v/2 - f(S_v)) / (k - |S_v|).  The grid {(1+eps)^i} tracks the running
    best singleton m within [m, 2km]; sets of pruned thresholds are dropped.
    """
    _validate_constraint(F, Cardinality(k))
    if not 0.0 < eps < 1.0:
        raise InputError("eps must lie in (0, 1)")
    order = list(range(F.n)) if stream is None else list(stream)
    prober = F.clone_detached()
    prober.set_memo(())
    prober.reset_counters()
    live: dict[int, SubmodularFunction] = {}
    retired_counters = EvalCounters()
    m = 0.0
    log1e = math.log1p(eps)

    def grid_range(m_now: float):
        lo = math.ceil(math.log(m_now) / log1e - 1e-12)
        hi = math.floor(math.log(2.0 * k * m_now) / log1e + 1e-12)
        return lo, hi

    touched = 0
    for e in order:
        sv = prober.gain_singleton(e)
        m = max(m, sv)
        if m <= 0.0:
            continue
        lo, hi = grid_range(m)
        for i in [i for i in live if i < lo or i > hi]:
            retired_counters += live.pop(i).counters
        for i in range(lo, hi + 1):
            if i not in live:
                inst = F.clone_detached()
                inst.set_memo(())
                inst.reset_counters()
                live[i] = inst
        for i, inst in live.items():
            if len(inst.memo) >= k or e in inst.memo:
                continue
            v = (1.0 + eps) ** i
            g = inst.gain_add(e)
            touched += 1
            if g >= (v / 2.0 - inst.memo_value()) / (k - len(inst.memo)):
                inst.update(e)

    best = None
    for inst in live.values():
        if best is None or inst.memo_value() > best.memo_value():
            best = inst
    if best is None:
        best = prober
        best.set_memo(())
    total = prober.counters.copy() + retired_counters
    for inst in live.values():
        total += inst.counters
    res = _result(best, [])
    res.counters = total
    res.stats = {"thresholds": len(live), "threshold_gains": touched}
    return res


def distributed_greedy(
    F: SubmodularFunction, k: int, machines: int, seed: int = 0
) -> MaximizationResult:
    """Two-round partition greedy: lazy greedy per partition, then on the union.

    Returns the better of the second-round solution and the best single
    partition's solution.
    """
    _validate_constraint(F, Cardinality(k))
    if machines < 1 or machines > F.n:
        raise InputError(f"machine count must lie in [1, {F.n}]")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(F.n)
    parts = [sorted(int(j) for j in perm[i::machines]) for i in range(machines)]
    union = []
    best_part = None
    total = F.counters.copy()
    total.reset()
    for part in parts:
        clone = F.clone_detached()
        clone.set_memo(())
        res = greedy_lazy(clone, Cardinality(min(k, len(part))), pool=part)
        union.extend(res.members)
        total += res.counters
        if best_part is None or res.value > best_part.value:
            best_part = res
    second = greedy_lazy(F, Cardinality(min(k, len(union))), pool=sorted(union))
    total += second.counters
    winner = second if second.value >= best_part.value else best_part
    out = MaximizationResult(
        selected=winner.selected,
        value=winner.value,
        counters=total,
        trace=winner.trace,
        seed=seed,
        stats={"partitions": machines, "union_size": len(set(union))},
    )
    return out


def local_search_usm(
    F: SubmodularFunction, eps: float = 1e-3, start=None
) -> MaximizationResult:
    """Unconstrained local search: add/remove passes to an approximate local optimum.

    A move must improve by more than (eps/n^2) * |current value|.  The final
    answer is the better of the local optimum and its complement, which is
    what carries the 1/3 guarantee for non-negative objectives.
    """
    n = F.n
    F.set_memo(() if start is None else start)
    value = F.memo_value()
    trace = []
    changed = True
    while changed:
        changed = False
        threshold = (eps / (n * n)) * abs(value)
        for j in range(n):
            if j in F.memo:
                continue
            g = F.gain_add(j)
            if g > max(threshold, ABS_TOL):
                F.update(j)
                value += g
                trace.append((j, g))
                changed = True
        threshold = (eps / (n * n)) * abs(value)
        for j in list(F.memo.members):
            g = F.gain_remove(j)
            if g < -max(threshold, ABS_TOL):
                F.downdate(j)
                value -= g
                trace.append((j, -g))
                changed = True
    value = F.memo_value()
    complement = [j for j in range(n) if j not in F.memo]
    twin = F.clone_detached()
    twin.set_memo(complement)
    comp_value = twin.memo_value()
    if comp_value > value:
        F.set_memo(complement)
    res = _result(F, trace)
    res.counters = res.counters + twin.counters
    res.stats = {"complement_value": comp_value, "local_value": value}
    return res


def bidirectional_greedy(F: SubmodularFunction, order=None) -> MaximizationResult:
    """Deterministic double greedy for unconstrained maximization.

    Grows A from empty and shrinks B from the full set along the given
    order, keeping whichever of the add/remove gains is larger; the two
    statistics live in detached clones.  Guarantees 1/3 of the optimum for
    non-negative objectives.
    """
    order = check_permutation(F.n, order if order is not None else range(F.n))
    grow = F.clone_detached()
    grow.set_memo(())
    shrink = F.clone_detached()
    shrink.set_memo(range(F.n))
    trace = []
    for e in order:
        e = int(e)
        a = grow.gain_add(e)
        b = -shrink.gain_remove(e)  # f(B - e) - f(B)
        if a >= b:
            grow.update(e)
            trace.append((e, a))
        else:
            shrink.downdate(e)
    res = _result(grow, trace)
    res.counters = grow.counters + shrink.counters
    return res


def randomized_greedy(F: SubmodularFunction, k: int, seed: int = 0) -> MaximizationResult:
    """Cardinality-constrained randomized greedy for non-monotone objectives.

    Each round ranks the remaining gains, pads the candidate list to k with
    zero-gain dummies (which also shield negative gains), and picks one of
    the k slots uniformly; drawing a dummy adds nothing that round.
    """
    _validate_constraint(F, Cardinality(k))
    rng = np.random.default_rng(seed)
    F.set_memo(())
    trace = []
    dummies = 0
    for _ in range(k):
        gains = []
        for j in range(F.n):
            if j not in F.memo:
                gains.append((F.gain_add(j), j))
        gains.sort(key=lambda t: (-t[0], t[1]))
        slots = [(g, j) for g, j in gains if g > 0.0][:k]
        pick = int(rng.integers(k))
        if pick >= len(slots):
            dummies += 1
            continue
        g, j = slots[pick]
        F.update(j)
        trace.append((j, g))
    res = _result(F, trace, seed=seed)
    res.stats = {"dummy_rounds": dummies}
    return res


def minorize_maximize(
    F: SubmodularFunction,
    c: Constraint,
    order_rule: str = "random",
    seed: int = 0,
    max_iters: int = 50,
) -> MaximizationResult:
    """Iterated tight-lower-bound maximization.

    Each round builds the extreme point tight at the current set (current
    members first, then the rest, ordered per ``order_rule``), solves the
    modular problem under the constraint exactly, and keeps the result;
    the objective never decreases.  ``order_rule`` is "random" (seeded,
    fresh each round) or "singletons" (fixed descending singleton values).
    """
    _validate_constraint(F, c)
    if order_rule not in ("random", "singletons"):
        raise InputError("order_rule must be 'random' or 'singletons'")
    rng = np.random.default_rng(seed)
    if order_rule == "singletons":
        vals = [(-F.gain_singleton(j), j) for j in range(F.n)]
        base_order = [j for _, j in sorted(vals)]
    current: list[int] = []
    seen = set()
    trace = []
    best_val = 0.0
    for it in range(max_iters):
        key = frozenset(current)
        if key in seen:
            break
        seen.add(key)
        if order_rule == "random":
            base_order = [int(j) for j in rng.permutation(F.n)]
        inside = [j for j in base_order if j in set(current)]
        outside = [j for j in base_order if j not in set(current)]
        h = extreme_point(F, np.asarray(inside + outside, dtype=np.intp))
        candidate = _modular_maximize(h, c)
        if h.value(candidate) < h.value(current) - ABS_TOL:
            break  # heuristic inner solve failed to improve the bound
        current = candidate
        F.set_memo(current)
        best_val = F.memo_value()
        trace.append((it, best_val))
    F.set_memo(current)
    res = _result(F, trace, seed=seed)
    res.stats = {"iterations": len(trace)}
    return res


def _modular_maximize(h, c: Constraint) -> list:
    """Exact modular maximization under the constraint (small-n knapsack)."""
    w = h.weights
    n = w.shape[0]
    if isinstance(c, Cardinality):
        order = sorted(range(n), key=lambda j: (-w[j], j))
        return sorted(j for j in order[: c.k] if w[j] > 0.0)
    if n <= 20:
        best, best_v = [], 0.0
        for mask in range(1 << n):
            members = [j for j in range(n) if mask >> j & 1]
            if c.cost(members) > c.budget:
                continue
            v = float(w[members].sum()) if members else 0.0
            if v > best_v + ABS_TOL:
                best, best_v = members, v
        return best
    chosen, spent = [], 0.0
    order = sorted(range(n), key=lambda j: (-(w[j] / c.costs[j]), j))
    for j in order:
        if w[j] > 0 and c.costs[j] <= c.budget - spent + ABS_TOL:
            chosen.append(j)
            spent += c.costs[j]
    singles = [j for j in range(n) if c.costs[j] <= c.budget]
    if singles:
        top = max(singles, key=lambda j: (w[j], -j))
        if w[top] > float(w[chosen].sum() if chosen else 0.0):
            return [top]
    return sorted(chosen)
