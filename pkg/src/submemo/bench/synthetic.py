"""Seeded synthetic instance generators, one per zoo class.

Similarity matrices come from random unit-vector dot products clipped at
zero (low ``dim`` gives flatter, more saturated gain profiles); kernels are
Gram matrices; set systems have a configurable density.  The same
(kind, n, seed, params) always yields the same data.
"""

from __future__ import annotations

import numpy as np

from ..core import InputError
from ..functions import (
    ClusteredConcaveModularData,
    ClusteredSetCoverData,
    DeepTwoLayerData,
    DispersionData,
    FacilityLocationData,
    FeatureBasedData,
    GraphCutData,
    LogDetData,
    MixtureData,
    ModularData,
    ProbabilisticSetCoverData,
    SaturatedCoverageData,
    SetCoverData,
)

SYNTHETIC_KINDS = (
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


def _unit_rows(rng, n: int, dim: int, clusters: int = 0, spread: float = 0.2) -> np.ndarray:
    if clusters > 0:
        # near-duplicate regime: points scatter tightly around a few centers
        centers = rng.normal(size=(clusters, dim))
        centers /= np.linalg.norm(centers, axis=1, keepdims=True)
        v = centers[rng.integers(0, clusters, size=n)] + spread * rng.normal(size=(n, dim))
    else:
        v = rng.normal(size=(n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _clipped_gram(rng, n: int, dim: int, clusters: int = 0, spread: float = 0.2) -> np.ndarray:
    v = _unit_rows(rng, n, dim, clusters, spread)
    s = v @ v.T
    s = 0.5 * (s + s.T)
    return np.clip(s, 0.0, None)


def _set_system(rng, n: int, universe: int, density: float):
    sets = []
    for _ in range(n):
        size = max(1, rng.binomial(universe, density))
        sets.append(sorted(rng.choice(universe, size=min(size, universe), replace=False).tolist()))
    weights = rng.uniform(0.5, 1.5, size=universe)
    return sets, weights


def gen_synthetic(kind: str, n: int, seed: int = 0, params: dict | None = None):
    """Build a reproducible data object for any zoo class.

    ``params`` are class-specific knobs: ``dim`` for similarity/kernel
    ranks, ``universe``/``density`` for set systems, ``features``/``nnz``
    for feature loads, ``clusters`` for clustered classes, ``alpha_frac``,
    ``lam``, ``ridge``, ``concave`` where they apply.
    """
    if kind not in SYNTHETIC_KINDS:
        raise InputError(f"unknown synthetic kind {kind!r} (choose from {SYNTHETIC_KINDS})")
    if n < 1:
        raise InputError("synthetic instances need n >= 1")
    p = dict(params or {})
    rng = np.random.default_rng(seed)

    if kind == "faclocation":
        return FacilityLocationData(
            _clipped_gram(
                rng,
                n,
                int(p.get("dim", 16)),
                int(p.get("clusters", 0)),
                float(p.get("spread", 0.2)),
            )
        )
    if kind == "satcov":
        return SaturatedCoverageData(
            _clipped_gram(rng, n, int(p.get("dim", 16))),
            alpha_fraction=float(p.get("alpha_frac", 0.25)),
        )
    if kind == "graphcut":
        return GraphCutData(
            _clipped_gram(rng, n, int(p.get("dim", 16))), lam=float(p.get("lam", 0.5))
        )
    if kind == "setcover":
        universe = int(p.get("universe", max(4, 2 * n)))
        sets, weights = _set_system(rng, n, universe, float(p.get("density", 0.1)))
        return SetCoverData(sets=sets, universe=universe, weights=weights)
    if kind == "clustersetcover":
        universe = int(p.get("universe", max(4, 2 * n)))
        sets, weights = _set_system(rng, n, universe, float(p.get("density", 0.1)))
        k = int(p.get("clusters", max(2, universe // 8)))
        assign = rng.integers(0, k, size=universe)
        clusters = [sorted(np.flatnonzero(assign == c).tolist()) for c in range(k)]
        clusters = [c for c in clusters if c]
        if not clusters:
            clusters = [list(range(universe))]
        return ClusteredSetCoverData(
            sets=sets, universe=universe, clusters=clusters, weights=weights
        )
    if kind == "probsetcover":
        universe = int(p.get("universe", max(4, 2 * n)))
        probs = rng.uniform(0.0, 1.0, size=(universe, n))
        probs[rng.random(size=probs.shape) > float(p.get("density", 0.25))] = 0.0
        weights = rng.uniform(0.5, 1.5, size=universe)
        return ProbabilisticSetCoverData(probs, weights)
    if kind == "featurebased":
        features = int(p.get("features", max(4, 2 * n)))
        nnz = min(int(p.get("nnz", 8)), features)
        ids = np.stack([rng.choice(features, size=nnz, replace=False) for _ in range(n)])
        vals = rng.gamma(2.0, 1.0, size=(n, nnz))
        lists = [(ids[j], vals[j]) for j in range(n)]
        return FeatureBasedData(
            lists, concave=p.get("concave", "sqrt"), num_features=features
        )
    if kind == "clusterconcave":
        k = int(p.get("clusters", max(2, n // 4)))
        assign = rng.integers(0, k, size=n)
        clusters, weights = [], []
        for c in range(k):
            members = np.flatnonzero(assign == c)
            if members.size == 0:
                continue
            clusters.append(members.tolist())
            weights.append(rng.gamma(2.0, 1.0, size=members.size).tolist())
        if not clusters:
            clusters, weights = [list(range(n))], [rng.gamma(2.0, 1.0, size=n).tolist()]
        return ClusteredConcaveModularData(
            clusters=clusters, cluster_weights=weights, n=n, concave=p.get("concave", "sqrt")
        )
    if kind == "logdet":
        dim = int(p.get("dim", n + 4))
        a = rng.normal(size=(n, dim)) / np.sqrt(dim)
        kernel = a @ a.T
        kernel = 0.5 * (kernel + kernel.T)
        return LogDetData(kernel, ridge=p.get("ridge"))
    if kind in ("dispmin", "dispsum", "dispminsum"):
        pts = rng.normal(size=(n, int(p.get("dim", 3))))
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
        d = 0.5 * (d + d.T)
        np.fill_diagonal(d, 0.0)
        return DispersionData(d, kind={"dispmin": "min", "dispsum": "sum", "dispminsum": "min-sum"}[kind])
    if kind == "modular":
        lo, hi = p.get("range", (-1.0, 2.0))
        return ModularData(rng.uniform(lo, hi, size=n))
    if kind == "mixture":
        comps = p.get(
            "components",
            [(1.0, "graphcut"), (0.5, "faclocation")],
        )
        built = []
        for i, (w, sub_kind) in enumerate(comps):
            built.append((float(w), gen_synthetic(sub_kind, n, seed + 101 * (i + 1), p.get("sub_params"))))
        return MixtureData(built)
    if kind == "deep2":
        f2 = int(p.get("inner_units", max(4, n // 2)))
        f1 = int(p.get("outer_units", max(2, f2 // 2)))
        scores = rng.gamma(2.0, 1.0, size=(f2, n))
        scores[rng.random(size=scores.shape) > float(p.get("density", 0.4))] = 0.0
        mix = rng.uniform(0.0, 1.0, size=(f1, f2))
        outer = rng.uniform(0.5, 1.5, size=f1)
        return DeepTwoLayerData(
            scores,
            mix,
            outer,
            concave_outer=p.get("concave_outer", "sqrt"),
            concave_inner=p.get("concave_inner", "sqrt"),
        )
    raise InputError(f"unhandled synthetic kind {kind!r}")  # pragma: no cover
