"""Coverage classes: set cover, clustered set cover, probabilistic set cover.

Set systems are stored flat (CSR over elements): ``items[indptr[j]:indptr[j+1]]``
are the universe ids covered by element j.  The statistic is a per-item
coverage count (or product of miss-probabilities for the probabilistic
variant), which makes gains O(|S_j|).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import InputError, SubmodularFunction


def _flatten_sets(sets, universe: int):
    indptr = np.zeros(len(sets) + 1, dtype=np.intp)
    chunks = []
    for j, s in enumerate(sets):
        arr = np.asarray(sorted(set(int(u) for u in s)), dtype=np.intp)
        if len(arr) != len(list(s)):
            raise InputError(f"set of element {j} contains duplicate items")
        if arr.size and (arr.min() < 0 or arr.max() >= universe):
            raise InputError(f"set of element {j} references items outside the universe")
        chunks.append(arr)
        indptr[j + 1] = indptr[j] + arr.size
    items = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.intp)
    return indptr, items


def _validated_weights(weights, universe: int) -> np.ndarray:
    if weights is None:
        return np.ones(universe)
    w = np.asarray(weights, dtype=float)
    if w.shape != (universe,):
        raise InputError(f"need one weight per universe item ({universe}), got {w.shape}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InputError("universe weights must be finite and non-negative")
    return w


@dataclass
class SetCoverData:
    """Item sets S_j over a weighted universe; f(X) = w(union of S_j, j in X)."""

    sets: list
    universe: int
    weights: np.ndarray | None = None
    indptr: np.ndarray = field(init=False, repr=False)
    items: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.universe < 0:
            raise InputError("universe size must be non-negative")
        self.universe = int(self.universe)
        self.indptr, self.items = _flatten_sets(self.sets, self.universe)
        self.weights = _validated_weights(self.weights, self.universe)

    @property
    def n(self) -> int:
        return len(self.sets)

    def item_slice(self, j: int) -> np.ndarray:
        return self.items[self.indptr[j] : self.indptr[j + 1]]


class SetCoverFunction(SubmodularFunction):
    """Coverage counts per universe item; gains read the 0/1 count boundary."""

    name = "set-cover"

    def __init__(self, data: SetCoverData):
        super().__init__(data.n)
        self.data = data
        self._count = np.zeros(data.universe, dtype=np.int64)

    def _covered_weight(self, idx) -> float:
        if idx.size == 0:
            return 0.0
        covered = np.zeros(self.data.universe, dtype=bool)
        for j in idx:
            covered[self.data.item_slice(j)] = True
        return float(self.data.weights[covered].sum())

    def _evaluate(self, idx):
        return self._covered_weight(idx)

    def _gain_add(self, j):
        it = self.data.item_slice(j)
        return float(self.data.weights[it[self._count[it] == 0]].sum())

    def _gain_remove(self, j):
        it = self.data.item_slice(j)
        return float(self.data.weights[it[self._count[it] == 1]].sum())

    def _update(self, j):
        self._count[self.data.item_slice(j)] += 1

    def _downdate(self, j):
        self._count[self.data.item_slice(j)] -= 1

    def _rebuild(self, idx):
        self._count = np.zeros(self.data.universe, dtype=np.int64)
        for j in idx:
            self._count[self.data.item_slice(j)] += 1

    def _value_from_statistic(self):
        return float(self.data.weights[self._count > 0].sum())

    def _statistic(self):
        return {"count": self._count.astype(float)}

    def _spawn(self):
        return SetCoverFunction(self.data)


@dataclass
class ClusteredSetCoverData:
    """Set cover with universe clusters C_1..C_k; f(X) = sum_c w(cover(X) & C_c).

    Clusters may overlap; an item covered once contributes its weight to
    every cluster containing it.
    """

    sets: list
    universe: int
    clusters: list = None
    weights: np.ndarray | None = None
    base: SetCoverData = field(init=False, repr=False)
    multiplicity: np.ndarray = field(init=False, repr=False)
    item_clusters_indptr: np.ndarray = field(init=False, repr=False)
    item_clusters: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.base = SetCoverData(self.sets, self.universe, self.weights)
        self.weights = self.base.weights
        if not self.clusters:
            raise InputError("clustered set cover needs at least one cluster")
        u = self.base.universe
        membership = [[] for _ in range(u)]
        for c, cluster in enumerate(self.clusters):
            seen = set()
            for item in cluster:
                item = int(item)
                if not 0 <= item < u:
                    raise InputError(f"cluster {c} references item {item} outside the universe")
                if item in seen:
                    raise InputError(f"cluster {c} lists item {item} twice")
                seen.add(item)
                membership[item].append(c)
        self.multiplicity = np.asarray([len(m) for m in membership], dtype=float)
        self.item_clusters_indptr = np.zeros(u + 1, dtype=np.intp)
        for item in range(u):
            self.item_clusters_indptr[item + 1] = self.item_clusters_indptr[item] + len(membership[item])
        self.item_clusters = (
            np.concatenate([np.asarray(m, dtype=np.intp) for m in membership])
            if u
            else np.zeros(0, dtype=np.intp)
        )

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def k(self) -> int:
        return len(self.clusters)

    def clusters_of(self, item: int) -> np.ndarray:
        return self.item_clusters[
            self.item_clusters_indptr[item] : self.item_clusters_indptr[item + 1]
        ]


class ClusteredSetCoverFunction(SubmodularFunction):
    """Per-item counts plus per-cluster covered weight as the statistic."""

    name = "clustered-set-cover"

    def __init__(self, data: ClusteredSetCoverData):
        super().__init__(data.n)
        self.data = data
        self._count = np.zeros(data.base.universe, dtype=np.int64)
        self._cluster_weight = np.zeros(data.k)

    def _effective(self, items: np.ndarray) -> np.ndarray:
        return self.data.weights[items] * self.data.multiplicity[items]

    def _evaluate(self, idx):
        if idx.size == 0:
            return 0.0
        covered = np.zeros(self.data.base.universe, dtype=bool)
        for j in idx:
            covered[self.data.base.item_slice(j)] = True
        hit = np.flatnonzero(covered)
        return float(self._effective(hit).sum())

    def _gain_add(self, j):
        it = self.data.base.item_slice(j)
        fresh = it[self._count[it] == 0]
        return float(self._effective(fresh).sum())

    def _gain_remove(self, j):
        it = self.data.base.item_slice(j)
        lone = it[self._count[it] == 1]
        return float(self._effective(lone).sum())

    def _shift_clusters(self, items: np.ndarray, sign: float) -> None:
        for u in items:
            self._cluster_weight[self.data.clusters_of(u)] += sign * self.data.weights[u]

    def _update(self, j):
        it = self.data.base.item_slice(j)
        fresh = it[self._count[it] == 0]
        self._count[it] += 1
        self._shift_clusters(fresh, +1.0)

    def _downdate(self, j):
        it = self.data.base.item_slice(j)
        lone = it[self._count[it] == 1]
        self._count[it] -= 1
        self._shift_clusters(lone, -1.0)

    def _rebuild(self, idx):
        self._count = np.zeros(self.data.base.universe, dtype=np.int64)
        self._cluster_weight = np.zeros(self.data.k)
        for j in idx:
            it = self.data.base.item_slice(j)
            fresh = it[self._count[it] == 0]
            self._count[it] += 1
            self._shift_clusters(fresh, +1.0)

    def _value_from_statistic(self):
        return float(self._cluster_weight.sum())

    def _statistic(self):
        return {"count": self._count.astype(float), "cluster_weight": self._cluster_weight}

    def _spawn(self):
        return ClusteredSetCoverFunction(self.data)


@dataclass
class ProbabilisticSetCoverData:
    """Per-item coverage probabilities p_uj; f(X) = sum_u w_u (1 - prod(1 - p_uj)).

    ``probs`` has one row per universe item and one column per element.
    """

    probs: np.ndarray
    weights: np.ndarray | None = None
    miss_cols: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 2:
            raise InputError("probability matrix must be 2-d (items x elements)")
        if np.any(p < 0) or np.any(p > 1) or not np.all(np.isfinite(p)):
            raise InputError("coverage probabilities must lie in [0, 1]")
        self.probs = p
        self.weights = _validated_weights(self.weights, p.shape[0])
        # miss_cols[j] = 1 - p[:, j], contiguous per element
        self.miss_cols = np.ascontiguousarray((1.0 - p).T)

    @property
    def n(self) -> int:
        return self.probs.shape[1]

    @property
    def universe(self) -> int:
        return self.probs.shape[0]


class ProbabilisticSetCoverFunction(SubmodularFunction):
    """Statistic: per-item product of miss probabilities over the memo set.

    Products that underflow to exactly zero cannot be divided out; a
    downdate (or removal gain) then recomputes the affected entries from
    the remaining members.
    """

    name = "probabilistic-set-cover"

    def __init__(self, data: ProbabilisticSetCoverData):
        super().__init__(data.n)
        self.data = data
        self._prod = np.ones(data.universe)

    def _evaluate(self, idx):
        if idx.size == 0:
            return 0.0
        prod = self.data.miss_cols[idx].prod(axis=0)
        return float((self.data.weights * (1.0 - prod)).sum())

    def _gain_add(self, j):
        hit = 1.0 - self.data.miss_cols[j]
        return float((self.data.weights * self._prod * hit).sum())

    def _prod_without(self, j) -> np.ndarray:
        """Product over memo-minus-j, dividing where safe, rescanning where not."""
        q = self.data.miss_cols[j]
        safe = (q > 0.0) & (self._prod > 0.0)
        out = np.empty_like(self._prod)
        out[safe] = self._prod[safe] / q[safe]
        unsafe = np.flatnonzero(~safe)
        if unsafe.size:
            rest = np.asarray([i for i in self.memo.members if i != j], dtype=np.intp)
            if rest.size:
                out[unsafe] = self.data.miss_cols[rest][:, unsafe].prod(axis=0)
            else:
                out[unsafe] = 1.0
        return out

    def _gain_remove(self, j):
        before = self._prod_without(j)
        return float((self.data.weights * (before - self._prod)).sum())

    def _update(self, j):
        self._prod *= self.data.miss_cols[j]

    def _downdate(self, j):
        self._prod = self._prod_without(j)

    def _rebuild(self, idx):
        self._prod = (
            self.data.miss_cols[idx].prod(axis=0) if idx.size else np.ones(self.data.universe)
        )

    def _value_from_statistic(self):
        return float((self.data.weights * (1.0 - self._prod)).sum())

    def _statistic(self):
        return {"product": self._prod}

    def _spawn(self):
        return ProbabilisticSetCoverFunction(self.data)
