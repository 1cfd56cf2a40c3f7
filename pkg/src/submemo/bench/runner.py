"""Experiment runner contrasting memoized (PM) and value-oracle (VO) runs.

A cell is one (function, algorithm, budget, mode) combination, repeated and
timed on a monotonic clock; the headline figure is the minimum wall time,
the mean is also recorded.  Reports mirror the familiar benchmark layout:
functions as rows, budgets-by-mode as columns, plus a JSON file with
per-cell counters and PM-vs-VO speedup ratios.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..bounds import extreme_point, subgradient_at, supergradient_grow, supergradient_shrink
from ..core import InputError, SubmodularFunction, wrap_value_oracle
from ..maximize import (
    Cardinality,
    bidirectional_greedy,
    distributed_greedy,
    greedy_lazy,
    greedy_naive,
    greedy_stochastic,
    local_search_usm,
    minorize_maximize,
    randomized_greedy,
    sieve_streaming,
)
from ..minimize import AtLeast, lovasz_descent, min_norm_point, mmin_constrained

MAXIMIZE_ALGORITHMS = {
    "naive-greedy": lambda F, k, seed: greedy_naive(F, Cardinality(k)),
    "lazy-greedy": lambda F, k, seed: greedy_lazy(F, Cardinality(k)),
    "stochastic-greedy": lambda F, k, seed: greedy_stochastic(F, k, seed=seed),
    "sieve-streaming": lambda F, k, seed: sieve_streaming(F, k),
    "distributed-greedy": lambda F, k, seed: distributed_greedy(F, k, machines=4, seed=seed),
    "local-search": lambda F, k, seed: local_search_usm(F),
    "bidirectional-greedy": lambda F, k, seed: bidirectional_greedy(F),
    "randomized-greedy": lambda F, k, seed: randomized_greedy(F, k, seed=seed),
    "minorize-maximize": lambda F, k, seed: minorize_maximize(F, Cardinality(k), seed=seed),
}

MINIMIZE_ALGORITHMS = {
    "min-norm-point": lambda F, k, seed: min_norm_point(F),
    "lovasz-descent": lambda F, k, seed: lovasz_descent(F, iterations=2000),
    "mmin": lambda F, k, seed: mmin_constrained(F, AtLeast(k)),
}

GRADIENT_TASKS = ("subgradient", "supergradient")


@dataclass
class ExperimentConfig:
    """One benchmark run: functions x budgets x modes for one algorithm."""

    functions: list  # [(name, SubmodularFunction), ...]
    algorithm: str = "lazy-greedy"
    mode: str = "both"  # pm | vo | both
    budgets: tuple = (0.05, 0.15, 0.30)
    repetitions: int = 3
    seed: int = 0
    kind: str = "maximize"  # maximize | minimize | gradients
    timing_strict: bool = False

    def __post_init__(self):
        if self.mode not in ("pm", "vo", "both"):
            raise InputError("mode must be pm, vo or both")
        if self.repetitions < 1:
            raise InputError("repetitions must be >= 1")
        for b in self.budgets:
            if not 0.0 < b <= 1.0:
                raise InputError(f"budgets must lie in (0, 1], got {b}")
        if self.kind not in ("maximize", "minimize", "gradients"):
            raise InputError("kind must be maximize, minimize or gradients")
        if self.kind == "maximize" and self.algorithm not in MAXIMIZE_ALGORITHMS:
            raise InputError(f"unknown maximization algorithm {self.algorithm!r}")
        if self.kind == "minimize" and self.algorithm not in MINIMIZE_ALGORITHMS:
            raise InputError(f"unknown minimization algorithm {self.algorithm!r}")


@dataclass
class TimingRecord:
    function: str
    algorithm: str
    mode: str
    budget: float | None
    wall_seconds: float
    wall_mean: float
    counters: dict
    value: float | None = None
    selected_size: int | None = None
    error: str | None = None

    def as_dict(self) -> dict:
        return {
            "function": self.function,
            "algorithm": self.algorithm,
            "mode": self.mode,
            "budget": self.budget,
            "wall_seconds": self.wall_seconds,
            "wall_mean": self.wall_mean,
            "counters": self.counters,
            "value": self.value,
            "selected_size": self.selected_size,
            "error": self.error,
        }


def _instance_for(base: SubmodularFunction, mode: str) -> SubmodularFunction:
    clone = base.clone_detached()
    clone.set_memo(())
    clone.reset_counters()
    return wrap_value_oracle(clone) if mode == "vo" else clone


def _run_gradients(F: SubmodularFunction, task: str, seed: int):
    rng = np.random.default_rng(seed)
    if task == "subgradient":
        order = rng.permutation(F.n)
        return extreme_point(F, order)
    anchor = sorted(rng.choice(F.n, size=F.n // 2, replace=False).tolist())
    return supergradient_grow(F, anchor)


def _time_cell(cfg: ExperimentConfig, name: str, base, mode: str, budget, task) -> TimingRecord:
    walls = []
    value = None
    size = None
    counters: dict = {}
    algorithm = cfg.algorithm if cfg.kind != "gradients" else task
    try:
        for rep in range(cfg.repetitions):
            inst = _instance_for(base, mode)
            start = time.perf_counter()
            if cfg.kind == "gradients":
                _run_gradients(inst, task, cfg.seed)
                res_value, res_size = None, None
            else:
                k = max(1, round(budget * base.n))
                fn = (MAXIMIZE_ALGORITHMS if cfg.kind == "maximize" else MINIMIZE_ALGORITHMS)[
                    cfg.algorithm
                ]
                res = fn(inst, k, cfg.seed)
                res_value = res.value
                res_size = len(res.selected) if hasattr(res, "selected") else None
            walls.append(time.perf_counter() - start)
            if rep == 0:
                value, size = res_value, res_size
                counters = inst.counters.as_dict()
    except Exception as err:  # cell failures are recorded, not fatal
        return TimingRecord(
            function=name,
            algorithm=algorithm,
            mode=mode,
            budget=budget,
            wall_seconds=float("nan"),
            wall_mean=float("nan"),
            counters=counters,
            error=f"{type(err).__name__}: {err}",
        )
    return TimingRecord(
        function=name,
        algorithm=algorithm,
        mode=mode,
        budget=budget,
        wall_seconds=min(walls),
        wall_mean=sum(walls) / len(walls),
        counters=counters,
        value=value,
        selected_size=size,
    )


def _pool_size(cfg: ExperimentConfig) -> int:
    if cfg.timing_strict:
        return 1
    env = os.environ.get("SUBMEMO_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"SUBMEMO_THREADS must be an integer, got {env!r}") from None
    return 1


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> list[TimingRecord]:
    """Execute every cell; optionally write report.csv / report.json."""
    modes = ("pm", "vo") if cfg.mode == "both" else (cfg.mode,)
    cells = []
    for name, base in cfg.functions:
        if cfg.kind == "gradients":
            for task in GRADIENT_TASKS:
                for mode in modes:
                    cells.append((name, base, mode, None, task))
        else:
            for budget in cfg.budgets:
                for mode in modes:
                    cells.append((name, base, mode, budget, None))
    workers = _pool_size(cfg)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(
                pool.map(lambda cell: _time_cell(cfg, *cell), cells)
            )
    else:
        records = [_time_cell(cfg, *cell) for cell in cells]
    if out_dir is not None:
        write_reports(cfg, records, out_dir)
    return records


def speedup_ratios(records: list[TimingRecord]) -> dict:
    """vo wall / pm wall per (function, algorithm, budget) with both modes."""
    by_key: dict = {}
    for r in records:
        if r.error:
            continue
        by_key.setdefault((r.function, r.algorithm, r.budget), {})[r.mode] = r.wall_seconds
    out = {}
    for key, walls in by_key.items():
        if "pm" in walls and "vo" in walls and walls["pm"] > 0:
            label = f"{key[0]}|{key[1]}|{key[2]}"
            out[label] = walls["vo"] / walls["pm"]
    return out


def write_reports(cfg: ExperimentConfig, records: list[TimingRecord], out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "algorithm": cfg.algorithm,
        "kind": cfg.kind,
        "mode": cfg.mode,
        "budgets": list(cfg.budgets),
        "repetitions": cfg.repetitions,
        "seed": cfg.seed,
        "records": [r.as_dict() for r in records],
        "speedups": speedup_ratios(records),
    }
    (out / "report.json").write_text(json.dumps(payload, indent=2), encoding="utf-8")

    functions = list(dict.fromkeys(r.function for r in records))
    modes = ("pm", "vo") if cfg.mode == "both" else (cfg.mode,)
    with open(out / "report.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if cfg.kind == "gradients":
            header = ["function"] + [
                f"{task}_{mode}" for task in GRADIENT_TASKS for mode in modes
            ]
            writer.writerow(header)
            for fn in functions:
                row = [fn]
                for task in GRADIENT_TASKS:
                    for mode in modes:
                        row.append(_cell_wall(records, fn, mode, None, task))
                writer.writerow(row)
        else:
            header = ["function"] + [
                f"{mode}_{int(round(100 * b))}%" for mode in modes for b in cfg.budgets
            ]
            writer.writerow(header)
            for fn in functions:
                row = [fn]
                for mode in modes:
                    for b in cfg.budgets:
                        row.append(_cell_wall(records, fn, mode, b, None))
                writer.writerow(row)


def _cell_wall(records, fn, mode, budget, task):
    for r in records:
        if r.function == fn and r.mode == mode and r.budget == budget:
            if task is None or r.algorithm == task:
                return "" if r.error else f"{r.wall_seconds:.6g}"
    return ""
