"""Polytope extreme points, modular bounds, and the convex extension.

Everything here is computed through the memoization contract: an extreme
point is one rebuild plus n gain/update pairs, the tight upper bound at X
costs one rebuild plus n gains, never a from-scratch oracle call.  Calls
mutate the function's memo set (they sweep it), so calls on one instance
must be serialized.
"""

from __future__ import annotations

import numpy as np

from .core import InputError, ModularFunction, Subset, SubmodularFunction, as_subset


def check_permutation(n: int, order) -> np.ndarray:
    order = np.asarray(order, dtype=np.intp)
    if order.shape != (n,) or not np.array_equal(np.sort(order), np.arange(n)):
        raise InputError("order must be a permutation of all element ids")
    return order


def extreme_point(F: SubmodularFunction, order) -> ModularFunction:
    """Extreme point of the submodular polyhedron for a visiting order.

    weight[order[i]] is the gain of order[i] on top of the first i elements;
    the weights telescope, so they sum to f(V).  Cost: one rebuild, n gain
    evaluations, n statistic updates.
    """
    order = check_permutation(F.n, order)
    F.set_memo(())
    weights = np.empty(F.n)
    for j in order:
        weights[j] = F.gain_add(j)
        F.update(j)
    return ModularFunction(0.0, weights)


def subgradient_at(F: SubmodularFunction, Y, tie_order=None) -> ModularFunction:
    """Tight modular lower bound at Y: extreme point with Y visited first."""
    sub = as_subset(F.n, Y)
    if tie_order is None:
        tie_order = range(F.n)
    tie_order = check_permutation(F.n, tie_order)
    first = [j for j in tie_order if j in sub]
    rest = [j for j in tie_order if j not in sub]
    return extreme_point(F, np.asarray(first + rest, dtype=np.intp))


def supergradient_grow(F: SubmodularFunction, X) -> ModularFunction:
    """Tight modular upper bound at X built from grow-style gains.

    Inside X the weight is the member's removal gain at X; outside it is the
    singleton value.  Cost: one rebuild plus n gain evaluations.
    """
    sub = as_subset(F.n, X)
    F.set_memo(sub)
    fx = F.memo_value()
    weights = np.empty(F.n)
    inside_total = 0.0
    for j in range(F.n):
        if j in sub:
            weights[j] = F.gain_remove(j)
            inside_total += weights[j]
        else:
            weights[j] = F.gain_singleton(j)
    return ModularFunction(fx - inside_total, weights)


def supergradient_shrink(F: SubmodularFunction, X) -> ModularFunction:
    """The second tight modular upper bound at X (shrink-style gains).

    Inside X the weight is the member's removal gain at V; outside it is the
    add gain at X.  Costs two rebuilds (memo at X, then at V) plus n gains.
    """
    sub = as_subset(F.n, X)
    F.set_memo(sub)
    fx = F.memo_value()
    weights = np.empty(F.n)
    outside = [j for j in range(F.n) if j not in sub]
    for j in outside:
        weights[j] = F.gain_add(j)
    F.set_memo(range(F.n))
    inside_total = 0.0
    for j in sub.members:
        weights[j] = F.gain_remove(j)
        inside_total += weights[j]
    return ModularFunction(fx - inside_total, weights)


def _descending_order(x: np.ndarray) -> np.ndarray:
    # stable sort on -x: ties broken by ascending element id
    return np.argsort(-np.asarray(x, dtype=float), kind="stable")


def lovasz_subgradient(F: SubmodularFunction, x) -> ModularFunction:
    """Extreme point attaining the convex extension at x (its subgradient)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (F.n,) or not np.all(np.isfinite(x)):
        raise InputError("need one finite coordinate per element")
    return extreme_point(F, _descending_order(x))


def lovasz_value(F: SubmodularFunction, x) -> float:
    """Convex extension value at x (equals f at indicator vectors)."""
    x = np.asarray(x, dtype=float)
    return lovasz_subgradient(F, x).dot(x)


def linear_oracle(F: SubmodularFunction, x, maximize: bool = True) -> ModularFunction:
    """Optimal base-polytope extreme point for a linear objective <h, x>.

    ``maximize=True`` sorts x descending (the polyhedron LP); ``False``
    sorts ascending, the direction used inside minimum-norm-point.  Ties
    break by ascending element id either way.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (F.n,) or not np.all(np.isfinite(x)):
        raise InputError("need one finite coordinate per element")
    order = _descending_order(x) if maximize else np.argsort(x, kind="stable")
    return extreme_point(F, order)


def chain_prefix_values(F: SubmodularFunction, x):
    """Extreme point at x plus the chain-set values its sweep passes through.

    Returns (h, prefix) where prefix[i] = f of the first i elements of the
    descending order of x; the chain sets are exactly the level sets of x,
    so the best threshold set is free once the sweep is done.
    """
    x = np.asarray(x, dtype=float)
    order = _descending_order(x)
    h = extreme_point(F, order)
    prefix = np.concatenate(([0.0], np.cumsum(h.weights[order])))
    return h, order, prefix
