"""Function zoo: concrete classes, the validated factory, and the rebuild check."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import GroundSet, InputError, SubmodularFunction
from .compose import (
    MixtureData,
    MixtureFunction,
    ModularData,
    ModularPenaltyData,
    ModularPenalizedFunction,
    ModularSetFunction,
)
from .concave import (
    ClusteredConcaveModularData,
    ClusteredConcaveModularFunction,
    Concave,
    DeepTwoLayerData,
    DeepTwoLayerFunction,
    FeatureBasedData,
    FeatureBasedFunction,
    make_concave,
)
from .coverage import (
    ClusteredSetCoverData,
    ClusteredSetCoverFunction,
    ProbabilisticSetCoverData,
    ProbabilisticSetCoverFunction,
    SetCoverData,
    SetCoverFunction,
)
from .dispersion import (
    DISPERSION_KINDS,
    DispersionData,
    DispersionMinFunction,
    DispersionMinSumFunction,
    DispersionSumFunction,
    make_dispersion,
)
from .graphs import (
    FacilityLocationData,
    FacilityLocationFunction,
    GraphCutData,
    GraphCutFunction,
    SaturatedCoverageData,
    SaturatedCoverageFunction,
)
from .spectral import LOGDET_REL_TOL, LogDetData, LogDetFunction

_SIMPLE_BUILDERS = {
    FacilityLocationData: FacilityLocationFunction,
    SaturatedCoverageData: SaturatedCoverageFunction,
    GraphCutData: GraphCutFunction,
    SetCoverData: SetCoverFunction,
    ClusteredSetCoverData: ClusteredSetCoverFunction,
    ProbabilisticSetCoverData: ProbabilisticSetCoverFunction,
    FeatureBasedData: FeatureBasedFunction,
    ClusteredConcaveModularData: ClusteredConcaveModularFunction,
    LogDetData: LogDetFunction,
    DeepTwoLayerData: DeepTwoLayerFunction,
    ModularData: ModularSetFunction,
}


def make_function(ground, spec) -> SubmodularFunction:
    """Build a memoized instance for ``spec`` over the given ground set.

    ``ground`` may be a GroundSet or a plain int.  The instance starts with
    an empty memo set and an empty statistic.  Raises InputError when the
    data is dimensionally inconsistent with the ground set or violates a
    class invariant.
    """
    n = ground.n if isinstance(ground, GroundSet) else int(ground)
    if n < 1:
        raise InputError("ground set must have at least one element")
    builder = _SIMPLE_BUILDERS.get(type(spec))
    if builder is not None:
        inst = builder(spec)
    elif isinstance(spec, DispersionData):
        inst = make_dispersion(spec)
    elif isinstance(spec, MixtureData):
        inst = MixtureFunction([(w, make_function(n, sub)) for w, sub in spec.components])
    elif isinstance(spec, ModularPenaltyData):
        base = spec.base if isinstance(spec.base, SubmodularFunction) else make_function(n, spec.base)
        inst = ModularPenalizedFunction(base, spec.penalty)
    else:
        raise InputError(f"unknown function spec type {type(spec).__name__}")
    if inst.n != n:
        raise InputError(f"spec describes {inst.n} elements, ground set has {n}")
    return inst


@dataclass
class StatReport:
    """Outcome of a rebuild-and-compare statistic audit."""

    max_deviation: float
    components: dict
    memo_size: int

    def ok(self, tol: float = 1e-9) -> bool:
        return self.max_deviation <= tol


def verify_statistic(F: SubmodularFunction) -> StatReport:
    """Rebuild F's statistic from scratch and report the max relative deviation.

    Read-only on F: the rebuild happens in a detached twin.  Deviations are
    |live - rebuilt| / max(1, |rebuilt|) per statistic entry.
    """
    twin = F._spawn()
    twin.memo = F.memo.copy()
    twin._rebuild(twin.memo.to_indices())
    live = F._statistic()
    fresh = twin._statistic()
    components = {}
    worst = 0.0
    for key, ref in fresh.items():
        a = np.asarray(live[key], dtype=float)
        b = np.asarray(ref, dtype=float)
        if a.shape != b.shape:
            components[key] = np.inf
            worst = np.inf
            continue
        if a.size == 0:
            components[key] = 0.0
            continue
        dev = float((np.abs(a - b) / np.maximum(1.0, np.abs(b))).max())
        components[key] = dev
        worst = max(worst, dev)
    return StatReport(max_deviation=worst, components=components, memo_size=len(F.memo))


def default_tolerance(F: SubmodularFunction) -> float:
    """Per-class agreement tolerance (log-det factors are looser)."""
    probe = F
    while True:
        if isinstance(probe, LogDetFunction):
            return LOGDET_REL_TOL
        if isinstance(probe, MixtureFunction):
            tols = []
            for _, child in probe.components:
                tols.append(default_tolerance(child))
            return max(tols)
        if isinstance(probe, ModularPenalizedFunction):
            probe = probe.base
            continue
        inner = getattr(probe, "_inner", None)
        if inner is not None:
            probe = inner
            continue
        return 1e-9


__all__ = [
    "Concave",
    "make_concave",
    "make_function",
    "verify_statistic",
    "default_tolerance",
    "StatReport",
    "DISPERSION_KINDS",
    "LOGDET_REL_TOL",
    "FacilityLocationData",
    "FacilityLocationFunction",
    "SaturatedCoverageData",
    "SaturatedCoverageFunction",
    "GraphCutData",
    "GraphCutFunction",
    "SetCoverData",
    "SetCoverFunction",
    "ClusteredSetCoverData",
    "ClusteredSetCoverFunction",
    "ProbabilisticSetCoverData",
    "ProbabilisticSetCoverFunction",
    "FeatureBasedData",
    "FeatureBasedFunction",
    "ClusteredConcaveModularData",
    "ClusteredConcaveModularFunction",
    "DeepTwoLayerData",
    "DeepTwoLayerFunction",
    "LogDetData",
    "LogDetFunction",
    "DispersionData",
    "DispersionMinFunction",
    "DispersionSumFunction",
    "DispersionMinSumFunction",
    "make_dispersion",
    "ModularData",
    "ModularSetFunction",
    "MixtureData",
    "MixtureFunction",
    "ModularPenaltyData",
    "ModularPenalizedFunction",
]
