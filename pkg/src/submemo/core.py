"""Core contract for memoized submodular functions.

A function instance owns three pieces of mutable state: the memoized set
(the set its statistic describes), the class-specific statistic itself, and
a bundle of operation counters.  Algorithms interact with the instance only
through the public methods below, which keeps the counter accounting exact:
``evaluate`` is the only entry point that pays full oracle cost, while
``gain_add`` / ``gain_remove`` / ``gain_singleton`` answer marginal values
from the live statistic.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field, fields

import numpy as np

REL_TOL = 1e-9
ABS_TOL = 1e-12


def close(a: float, b: float, rel: float = REL_TOL) -> bool:
    """Relative comparison with an absolute floor, the library-wide rule."""
    return abs(a - b) <= max(ABS_TOL, rel * max(1.0, abs(a), abs(b)))


def tol_for(value: float, rel: float = REL_TOL) -> float:
    return max(ABS_TOL, rel * abs(value))


class InputError(ValueError):
    """Malformed input: out-of-range ids, dimension mismatch, bad data."""


class PreconditionError(InputError):
    """Operation called in a state that violates its precondition."""


class NonConvergenceError(RuntimeError):
    """Iterative solver hit its iteration cap; carries the best iterate."""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class GroundSet:
    """Ground set of ``n`` elements with integer ids ``0..n-1``."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InputError(f"ground set size must be a positive int, got {self.n!r}")


class Subset:
    """Ordered set of distinct element ids with an O(1) membership mask.

    The member order is meaningful: it is the order in which elements were
    added, and classes whose statistic is order-sensitive (the triangular
    factor of the log-det class) rely on it.
    """

    __slots__ = ("n", "_members", "_mask")

    def __init__(self, n: int, members=()):
        if n < 1:
            raise InputError(f"subset needs a positive ground set size, got {n}")
        self.n = int(n)
        self._members: list[int] = []
        self._mask = np.zeros(self.n, dtype=bool)
        for j in members:
            self.add(j)

    @classmethod
    def empty(cls, n: int) -> "Subset":
        return cls(n)

    @classmethod
    def full(cls, n: int) -> "Subset":
        return cls(n, range(n))

    @property
    def members(self) -> list[int]:
        """Insertion-ordered member ids (do not mutate)."""
        return self._members

    @property
    def mask(self) -> np.ndarray:
        """Boolean membership mask (do not mutate)."""
        return self._mask

    def add(self, j) -> None:
        j = _check_id(j, self.n)
        if self._mask[j]:
            raise PreconditionError(f"element {j} already in subset")
        self._members.append(j)
        self._mask[j] = True

    def remove(self, j) -> None:
        j = _check_id(j, self.n)
        if not self._mask[j]:
            raise PreconditionError(f"element {j} not in subset")
        self._members.remove(j)
        self._mask[j] = False

    def to_indices(self) -> np.ndarray:
        return np.asarray(self._members, dtype=np.intp)

    def copy(self) -> "Subset":
        c = Subset.__new__(Subset)
        c.n = self.n
        c._members = list(self._members)
        c._mask = self._mask.copy()
        return c

    def complement_members(self) -> list[int]:
        return [j for j in range(self.n) if not self._mask[j]]

    def __contains__(self, j) -> bool:
        return 0 <= j < self.n and bool(self._mask[j])

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self):
        return iter(self._members)

    def __eq__(self, other) -> bool:
        if isinstance(other, Subset):
            return self.n == other.n and np.array_equal(self._mask, other._mask)
        return NotImplemented

    def __repr__(self) -> str:
        return f"Subset(n={self.n}, members={self._members})"


def _check_id(j, n: int) -> int:
    if not isinstance(j, (int, np.integer)):
        raise InputError(f"element id must be an integer, got {j!r}")
    if not 0 <= j < n:
        raise InputError(f"element id {j} out of range [0, {n})")
    return int(j)


def as_subset(n: int, X) -> Subset:
    """Coerce an iterable of ids (or a Subset) to a validated Subset."""
    if isinstance(X, Subset):
        if X.n != n:
            raise InputError(f"subset over ground set {X.n}, expected {n}")
        return X
    return Subset(n, X)


@dataclass
class EvalCounters:
    """Work counters distinguishing oracle cost from statistic-based cost.

    ``oracle_evals`` counts from-scratch f(X) evaluations, ``gain_evals``
    statistic-based marginal computations, ``memo_updates`` /
    ``memo_downdates`` incremental statistic transitions (kept separate
    because one class has an asymmetric downdate), and ``memo_rebuilds``
    from-scratch statistic builds.
    """

    oracle_evals: int = 0
    gain_evals: int = 0
    memo_updates: int = 0
    memo_downdates: int = 0
    memo_rebuilds: int = 0

    def copy(self) -> "EvalCounters":
        return EvalCounters(**self.as_dict())

    def reset(self) -> None:
        for f in fields(self):
            setattr(self, f.name, 0)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def __add__(self, other: "EvalCounters") -> "EvalCounters":
        return EvalCounters(
            **{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)}
        )

    def __sub__(self, other: "EvalCounters") -> "EvalCounters":
        return EvalCounters(
            **{f.name: getattr(self, f.name) - getattr(other, f.name) for f in fields(self)}
        )


@dataclass
class ModularFunction:
    """Offset plus per-element weights: m(Y) = offset + sum_{j in Y} w_j.

    Houses subgradients and the two supergradient bounds; evaluating at any
    Y is O(|Y|) and never touches the function instance again.
    """

    offset: float
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 1:
            raise InputError("modular weights must be a 1-d array")

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def value(self, X) -> float:
        if isinstance(X, Subset):
            idx = X.to_indices()
        else:
            idx = np.asarray(list(X), dtype=np.intp)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise InputError("element id out of range in modular evaluation")
        return float(self.offset + self.weights[idx].sum())

    def dot(self, x: np.ndarray) -> float:
        return float(np.dot(self.weights, x))

    def __call__(self, X) -> float:
        return self.value(X)


class SubmodularFunction(ABC):
    """Abstract memoized set function over ``{0..n-1}``.

    Subclasses implement the underscore hooks; the public methods add
    precondition checks, memo-set bookkeeping and counter accounting.
    All classes are normalized so f(empty) = 0.
    """

    name = "abstract"

    def __init__(self, n: int):
        if n < 1:
            raise InputError(f"ground set must have at least one element, got {n}")
        self.n = int(n)
        self.memo = Subset.empty(self.n)
        self.counters = EvalCounters()

    # ------------------------------------------------------------------
    # public contract
    # ------------------------------------------------------------------

    def evaluate(self, X) -> float:
        """From-scratch f(X).  Counts one oracle evaluation; memo untouched."""
        sub = as_subset(self.n, X)
        self.counters.oracle_evals += 1
        return self._evaluate(sub.to_indices())

    def gain_add(self, j) -> float:
        """f(memo + j) - f(memo) from the live statistic (read-only)."""
        j = _check_id(j, self.n)
        if j in self.memo:
            raise PreconditionError(f"gain_add: element {j} already memoized")
        self.counters.gain_evals += 1
        return self._gain_add(j)

    def gain_remove(self, j) -> float:
        """f(memo) - f(memo - j) from the live statistic (read-only)."""
        j = _check_id(j, self.n)
        if j not in self.memo:
            raise PreconditionError(f"gain_remove: element {j} not memoized")
        self.counters.gain_evals += 1
        return self._gain_remove(j)

    def gain_singleton(self, j) -> float:
        """f({j}), the gain of j over the empty set.

        Cheap for every class (the empty statistic is trivial), so it is
        accounted as a statistic-based gain, not an oracle call.
        """
        j = _check_id(j, self.n)
        self.counters.gain_evals += 1
        return self._singleton(j)

    def update(self, j) -> None:
        """Transform the statistic p_X into p_{X+j} and grow the memo set."""
        j = _check_id(j, self.n)
        if j in self.memo:
            raise PreconditionError(f"update: element {j} already memoized")
        self.counters.memo_updates += 1
        self._update(j)
        self.memo.add(j)

    def downdate(self, j) -> None:
        """Transform the statistic p_X into p_{X-j} and shrink the memo set."""
        j = _check_id(j, self.n)
        if j not in self.memo:
            raise PreconditionError(f"downdate: element {j} not memoized")
        self.counters.memo_downdates += 1
        self._downdate(j)
        self.memo.remove(j)

    def set_memo(self, X) -> None:
        """Point the memo at X and rebuild the statistic from scratch."""
        sub = as_subset(self.n, X)
        self.counters.memo_rebuilds += 1
        self.memo = sub.copy()
        self._rebuild(self.memo.to_indices())

    def memo_value(self) -> float:
        """f(memo_set) read off the live statistic; free of oracle cost."""
        return self._value_from_statistic()

    def clone_detached(self) -> "SubmodularFunction":
        """Independent copy: shared immutable data, fresh memo state/counters."""
        c = self._spawn()
        c.memo = self.memo.copy()
        c._rebuild(c.memo.to_indices())
        return c

    def reset_counters(self) -> None:
        self.counters.reset()

    def __repr__(self) -> str:
        return f"<{type(self).__name__} n={self.n} |memo|={len(self.memo)}>"

    # ------------------------------------------------------------------
    # per-class hooks (no counter or memo bookkeeping inside)
    # ------------------------------------------------------------------

    @abstractmethod
    def _evaluate(self, idx: np.ndarray) -> float:
        """From-scratch f over the given member ids (statistic unused)."""

    @abstractmethod
    def _gain_add(self, j: int) -> float:
        ...

    @abstractmethod
    def _gain_remove(self, j: int) -> float:
        ...

    def _singleton(self, j: int) -> float:
        return self._evaluate(np.asarray([j], dtype=np.intp))

    @abstractmethod
    def _update(self, j: int) -> None:
        """Statistic transition before j joins the memo set."""

    @abstractmethod
    def _downdate(self, j: int) -> None:
        """Statistic transition while j is still in the memo set."""

    @abstractmethod
    def _rebuild(self, idx: np.ndarray) -> None:
        """Overwrite the statistic with the from-scratch build for ``idx``."""

    @abstractmethod
    def _value_from_statistic(self) -> float:
        ...

    @abstractmethod
    def _statistic(self) -> dict:
        """Name -> float array snapshot views used by verify/rebuild checks."""

    @abstractmethod
    def _spawn(self) -> "SubmodularFunction":
        """Fresh empty instance sharing this instance's immutable data."""


class ValueOracleFunction(SubmodularFunction):
    """Value-oracle baseline: the statistic degenerates to the scalar f(X).

    Every gain costs one fresh oracle evaluation against the cached f(X);
    statistic-based gain counters never move.  The most recent gain is kept
    as a pending value so that accepting that element (update/downdate)
    costs no extra oracle call, mirroring how a careful value-oracle
    implementation would run greedy-style loops.
    """

    def __init__(self, inner: SubmodularFunction):
        super().__init__(inner.n)
        self._inner = inner
        self._cached = 0.0
        self._pending = None  # (kind, j, resulting f value)
        self.name = f"value-oracle({inner.name})"

    def _oracle(self, idx: np.ndarray) -> float:
        self.counters.oracle_evals += 1
        return self._inner._evaluate(idx)

    # public overrides: gains are oracle calls here, not statistic reads

    def gain_add(self, j) -> float:
        j = _check_id(j, self.n)
        if j in self.memo:
            raise PreconditionError(f"gain_add: element {j} already memoized")
        idx = np.append(self.memo.to_indices(), j)
        fnew = self._oracle(idx)
        self._pending = ("add", j, fnew)
        return fnew - self._cached

    def gain_remove(self, j) -> float:
        j = _check_id(j, self.n)
        if j not in self.memo:
            raise PreconditionError(f"gain_remove: element {j} not memoized")
        rest = [i for i in self.memo.members if i != j]
        fnew = self._oracle(np.asarray(rest, dtype=np.intp))
        self._pending = ("remove", j, fnew)
        return self._cached - fnew

    def gain_singleton(self, j) -> float:
        j = _check_id(j, self.n)
        return self._oracle(np.asarray([j], dtype=np.intp))

    def update(self, j) -> None:
        j = _check_id(j, self.n)
        if j in self.memo:
            raise PreconditionError(f"update: element {j} already memoized")
        self.counters.memo_updates += 1
        if self._pending and self._pending[0] == "add" and self._pending[1] == j:
            self._cached = self._pending[2]
        else:
            self._cached = self._oracle(np.append(self.memo.to_indices(), j))
        self._pending = None
        self.memo.add(j)

    def downdate(self, j) -> None:
        j = _check_id(j, self.n)
        if j not in self.memo:
            raise PreconditionError(f"downdate: element {j} not memoized")
        self.counters.memo_downdates += 1
        if self._pending and self._pending[0] == "remove" and self._pending[1] == j:
            self._cached = self._pending[2]
        else:
            rest = [i for i in self.memo.members if i != j]
            self._cached = self._oracle(np.asarray(rest, dtype=np.intp))
        self._pending = None
        self.memo.remove(j)

    def set_memo(self, X) -> None:
        sub = as_subset(self.n, X)
        self.counters.memo_rebuilds += 1
        self.memo = sub.copy()
        self._pending = None
        if len(self.memo) == 0:
            self._cached = 0.0  # normalization, known without an oracle call
        else:
            self._cached = self._oracle(self.memo.to_indices())

    # hooks

    def _evaluate(self, idx: np.ndarray) -> float:
        return self._inner._evaluate(idx)

    def _gain_add(self, j):  # pragma: no cover - public method bypasses this
        raise NotImplementedError

    def _gain_remove(self, j):  # pragma: no cover
        raise NotImplementedError

    def _update(self, j):  # pragma: no cover
        raise NotImplementedError

    def _downdate(self, j):  # pragma: no cover
        raise NotImplementedError

    def _rebuild(self, idx: np.ndarray) -> None:
        self._pending = None
        self._cached = 0.0 if idx.size == 0 else self._inner._evaluate(idx)

    def _value_from_statistic(self) -> float:
        return self._cached

    def _statistic(self) -> dict:
        return {"value": np.asarray([self._cached])}

    def _spawn(self) -> "ValueOracleFunction":
        return ValueOracleFunction(self._inner._spawn())


def wrap_value_oracle(F: SubmodularFunction) -> ValueOracleFunction:
    """Value-oracle view of ``F``: same function, oracle-only accounting.

    The wrapper starts at F's current memo set (its cached value is filled
    during construction, which is not metered).
    """
    vo = ValueOracleFunction(F._spawn())
    vo.memo = F.memo.copy()
    vo._cached = 0.0 if len(vo.memo) == 0 else vo._inner._evaluate(vo.memo.to_indices())
    return vo
