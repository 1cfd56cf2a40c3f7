"""Similarity-graph classes: facility location, saturated coverage, graph cut.

All three work off an n-by-n non-negative similarity matrix and keep an
O(n) statistic: per-row top-2 records for facility location, per-row sums
for the other two.  The matrix is stored column-contiguously (``cols[j]``
is the similarity of every i to j) because gains and updates touch whole
columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import InputError, SubmodularFunction


def _validated_square(matrix, require_symmetric: bool, what: str) -> np.ndarray:
    s = np.asarray(matrix, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise InputError(f"{what} must be a square matrix, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise InputError(f"{what} contains non-finite entries")
    if np.any(s < 0):
        raise InputError(f"{what} must be non-negative")
    if require_symmetric and not np.allclose(s, s.T, rtol=1e-9, atol=1e-12):
        raise InputError(f"{what} must be symmetric")
    return s


@dataclass
class FacilityLocationData:
    """Non-negative similarity matrix s_ij between every pair of elements."""

    similarity: np.ndarray
    cols: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.similarity = _validated_square(self.similarity, False, "facility location similarity")
        # cols[j] is s[:, j], contiguous: the gain/update hot path
        self.cols = np.ascontiguousarray(self.similarity.T)

    @property
    def n(self) -> int:
        return self.similarity.shape[0]


class FacilityLocationFunction(SubmodularFunction):
    """f(X) = sum_i max_{j in X} s_ij with a per-row (best, second-best) statistic.

    Adding k is a vectorized shift of the top-2 records; removing k rebuilds
    the records only for the rows where k held the best or second value, by
    scanning the remaining memo set.
    """

    name = "facility-location"

    def __init__(self, data: FacilityLocationData):
        super().__init__(data.n)
        self.data = data
        n = self.n
        self._best = np.zeros(n)
        self._second = np.zeros(n)
        self._arg = np.full(n, -1, dtype=np.intp)
        self._arg2 = np.full(n, -1, dtype=np.intp)
        self._buf = np.empty(n)

    def _evaluate(self, idx):
        if idx.size == 0:
            return 0.0
        return float(self.data.cols[idx].max(axis=0).sum())

    def _gain_add(self, j):
        buf = self._buf
        np.subtract(self.data.cols[j], self._best, out=buf)
        np.maximum(buf, 0.0, out=buf)
        return float(buf.sum())

    def _gain_remove(self, j):
        hit = self._arg == j
        return float((self._best[hit] - self._second[hit]).sum())

    def _update(self, j):
        col = self.data.cols[j]
        beats1 = col > self._best
        beats2 = ~beats1 & (col > self._second)
        self._second[beats1] = self._best[beats1]
        self._arg2[beats1] = self._arg[beats1]
        self._best[beats1] = col[beats1]
        self._arg[beats1] = j
        self._second[beats2] = col[beats2]
        self._arg2[beats2] = j

    def _downdate(self, j):
        affected = np.flatnonzero((self._arg == j) | (self._arg2 == j))
        if affected.size == 0:
            return
        rest = np.asarray([i for i in self.memo.members if i != j], dtype=np.intp)
        self._retop(affected, rest)

    def _retop(self, rows: np.ndarray, members: np.ndarray) -> None:
        """Recompute top-2 records of ``rows`` over ``members``."""
        if members.size == 0:
            self._best[rows] = 0.0
            self._second[rows] = 0.0
            self._arg[rows] = -1
            self._arg2[rows] = -1
            return
        sub = self.data.cols[members][:, rows]  # (|members|, |rows|)
        top = sub.argmax(axis=0)
        r = np.arange(rows.size)
        self._best[rows] = sub[top, r]
        self._arg[rows] = members[top]
        if members.size == 1:
            self._second[rows] = 0.0
            self._arg2[rows] = -1
            return
        sub[top, r] = -np.inf
        top2 = sub.argmax(axis=0)
        self._second[rows] = sub[top2, r]
        self._arg2[rows] = members[top2]

    def _rebuild(self, idx):
        n = self.n
        self._best = np.zeros(n)
        self._second = np.zeros(n)
        self._arg = np.full(n, -1, dtype=np.intp)
        self._arg2 = np.full(n, -1, dtype=np.intp)
        if idx.size:
            self._retop(np.arange(n, dtype=np.intp), idx)

    def _value_from_statistic(self):
        return float(self._best.sum())

    def _statistic(self):
        return {"best": self._best, "second": self._second}

    def _spawn(self):
        return FacilityLocationFunction(self.data)


@dataclass
class SaturatedCoverageData:
    """Similarity matrix plus per-row saturation thresholds alpha_i.

    When ``alpha`` is omitted it defaults to ``alpha_fraction`` times each
    row sum, the usual summarization setting.
    """

    similarity: np.ndarray
    alpha: np.ndarray | None = None
    alpha_fraction: float = 0.25
    cols: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.similarity = _validated_square(self.similarity, False, "saturated coverage similarity")
        self.cols = np.ascontiguousarray(self.similarity.T)
        if self.alpha is None:
            if not 0 < self.alpha_fraction:
                raise InputError("alpha_fraction must be positive")
            self.alpha = self.alpha_fraction * self.similarity.sum(axis=1)
        self.alpha = np.asarray(self.alpha, dtype=float)
        if self.alpha.shape != (self.similarity.shape[0],):
            raise InputError("alpha must have one threshold per row")
        if np.any(self.alpha < 0) or not np.all(np.isfinite(self.alpha)):
            raise InputError("alpha thresholds must be finite and non-negative")

    @property
    def n(self) -> int:
        return self.similarity.shape[0]


class SaturatedCoverageFunction(SubmodularFunction):
    """f(X) = sum_i min(sum_{j in X} s_ij, alpha_i); statistic = the row sums."""

    name = "saturated-coverage"

    def __init__(self, data: SaturatedCoverageData):
        super().__init__(data.n)
        self.data = data
        self._rowsum = np.zeros(self.n)

    def _evaluate(self, idx):
        if idx.size == 0:
            return 0.0
        return float(np.minimum(self.data.cols[idx].sum(axis=0), self.data.alpha).sum())

    def _clipped(self, rowsum):
        return np.minimum(rowsum, self.data.alpha)

    def _gain_add(self, j):
        p = self._rowsum
        return float((self._clipped(p + self.data.cols[j]) - self._clipped(p)).sum())

    def _gain_remove(self, j):
        p = self._rowsum
        return float((self._clipped(p) - self._clipped(p - self.data.cols[j])).sum())

    def _update(self, j):
        self._rowsum += self.data.cols[j]

    def _downdate(self, j):
        self._rowsum -= self.data.cols[j]

    def _rebuild(self, idx):
        self._rowsum = (
            self.data.cols[idx].sum(axis=0) if idx.size else np.zeros(self.n)
        )

    def _value_from_statistic(self):
        return float(self._clipped(self._rowsum).sum())

    def _statistic(self):
        return {"rowsum": self._rowsum}

    def _spawn(self):
        return SaturatedCoverageFunction(self.data)


@dataclass
class GraphCutData:
    """Symmetric similarity matrix with coverage/diversity trade-off lam.

    lam = 1 is the standard cut, lam = 0 the pure redundancy penalty.
    """

    similarity: np.ndarray
    lam: float = 1.0
    cols: np.ndarray = field(init=False, repr=False)
    col_sums: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.similarity = _validated_square(self.similarity, True, "graph cut similarity")
        if not np.isfinite(self.lam) or self.lam < 0:
            raise InputError("graph cut lambda must be finite and >= 0")
        self.lam = float(self.lam)
        self.cols = np.ascontiguousarray(self.similarity.T)
        self.col_sums = self.similarity.sum(axis=0)

    @property
    def n(self) -> int:
        return self.similarity.shape[0]


class GraphCutFunction(SubmodularFunction):
    """f(X) = lam * sum_{i in V, j in X} s_ij - sum_{i,j in X} s_ij.

    Statistic: row sums p[i] = sum_{j in X} s_ij, giving O(1) gains after
    the O(n^2) column sums are fixed at construction.
    """

    name = "graph-cut"

    def __init__(self, data: GraphCutData):
        super().__init__(data.n)
        self.data = data
        self._rowsum = np.zeros(self.n)

    def _evaluate(self, idx):
        if idx.size == 0:
            return 0.0
        rows = self.data.cols[idx]
        return float(self.data.lam * rows.sum() - rows[:, idx].sum())

    def _gain_add(self, j):
        d = self.data
        return float(d.lam * d.col_sums[j] - 2.0 * self._rowsum[j] - d.similarity[j, j])

    def _gain_remove(self, j):
        d = self.data
        return float(d.lam * d.col_sums[j] - 2.0 * self._rowsum[j] + d.similarity[j, j])

    def _update(self, j):
        self._rowsum += self.data.cols[j]

    def _downdate(self, j):
        self._rowsum -= self.data.cols[j]

    def _rebuild(self, idx):
        self._rowsum = (
            self.data.cols[idx].sum(axis=0) if idx.size else np.zeros(self.n)
        )

    def _value_from_statistic(self):
        inside = self._rowsum[self.memo.to_indices()].sum() if len(self.memo) else 0.0
        return float(self.data.lam * self._rowsum.sum() - inside)

    def _statistic(self):
        return {"rowsum": self._rowsum}

    def _spawn(self):
        return GraphCutFunction(self.data)
