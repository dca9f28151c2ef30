"""Multi-game comparison suites with deterministic scheduling.

A suite runs each named solver variant on the same set of seeded random
games.  Per-game seeds derive from the master seed by fixed offsets, and
results are keyed by (game index, algorithm), so the report is identical
however the worker pool interleaves the runs.  Gap statistics aggregate in
the natural-log domain (gaps live on a log scale) with Student-t 95%
confidence intervals.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import t as student_t

from . import rng
from .game import random_game
from .solvers import ALIASES, SolverConfig, run

# Checkpoint grid used by the logarithmically spaced ten-point preset.
PAPER_EXP2_SCHEDULE = (1, 3, 13, 51, 189, 703, 2610, 9687, 35949, 49999)

GAP_LOG_FLOOR = 1e-300

REPORT_FORMAT_VERSION = 1

THREADS_ENV_VAR = "QZSG_THREADS"


@dataclass(frozen=True)
class ExperimentSpec:
    """A comparison suite: games x algorithms under one master seed."""

    n: int
    m: int
    games: int
    master_seed: int
    algorithms: tuple
    iters: int
    outcomes: int | None = None
    checkpoints: tuple | None = None
    check_interval: int = 50
    step_size: float | str = "auto"
    target_gap: float = 0.0

    def validate(self) -> None:
        if self.n < 1 or self.m < 1:
            raise ValueError("qubit counts must be >= 1")
        if self.games < 1:
            raise ValueError("games must be >= 1")
        if self.iters < 1:
            raise ValueError("iters must be >= 1")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        for alias in self.algorithms:
            if alias not in ALIASES:
                raise ValueError(
                    f"unknown solver alias {alias!r}; expected one of {sorted(ALIASES)}"
                )
        if self.outcomes is not None and self.outcomes < 2:
            raise ValueError("outcomes must be ≥ 2")
        if self.check_interval < 1:
            raise ValueError("check_interval must be >= 1")


def suite_game_seed(master_seed: int, game_index: int) -> int:
    """Seed for game `game_index`, a fixed function of the master seed."""
    return rng.derive_seed(master_seed, game_index)


def execute_run(spec: ExperimentSpec, game_index: int, alias: str) -> dict:
    """Run one (game, algorithm) cell; exceptions are reported, not raised."""
    seed = suite_game_seed(spec.master_seed, game_index)
    base = {"game_index": game_index, "algorithm": alias, "seed": seed}
    try:
        game = random_game(spec.n, spec.m, spec.outcomes, seed)
        cfg = SolverConfig.from_alias(
            alias,
            step_size=spec.step_size,
            max_iters=spec.iters,
            target_gap=spec.target_gap,
            gap_check_interval=spec.check_interval,
            seed=seed,
        )
        result = run(game, cfg, checkpoints=spec.checkpoints)
    except Exception as exc:  # noqa: BLE001 - one bad cell must not sink the suite
        return {**base, "status": "error", "error": f"{type(exc).__name__}: {exc}"}
    return {
        **base,
        "status": "ok",
        "error": None,
        "step_size": result.step_size,
        "iterations": result.iterations,
        "gradient_calls": result.gradient_calls,
        "final_gap_avg": result.trace[-1].gap_avg,
        "final_gap_last": result.trace[-1].gap_last,
        "checkpoints": [
            {
                "t": row.t,
                "gap_avg": row.gap_avg,
                "gap_last": row.gap_last,
                "wall_time_ns": row.wall_time_ns,
            }
            for row in result.trace
        ],
    }


def worker_count(max_workers: int | None = None) -> int:
    """Resolve the pool size, capped by the QZSG_THREADS environment variable."""
    if max_workers is None:
        env = os.environ.get(THREADS_ENV_VAR, "").strip()
        if env:
            try:
                max_workers = int(env)
            except ValueError:
                raise ValueError(
                    f"{THREADS_ENV_VAR} must be an integer, got {env!r}"
                ) from None
        else:
            max_workers = os.cpu_count() or 1
    if max_workers < 1:
        raise ValueError("worker count must be >= 1")
    return max_workers


def _stats(values: list) -> dict:
    """Mean and log-domain Student-t 95% CI; a singleton has zero-width CI."""
    arr = np.asarray(values, dtype=float)
    logs = np.log(np.maximum(arr, GAP_LOG_FLOOR))
    log_mean = float(np.mean(logs))
    geomean = float(math.exp(log_mean))
    if arr.size == 1:
        lo = hi = geomean
    else:
        half = float(student_t.ppf(0.975, arr.size - 1)) * float(
            np.std(logs, ddof=1)
        ) / math.sqrt(arr.size)
        lo, hi = math.exp(log_mean - half), math.exp(log_mean + half)
    return {
        "mean": float(np.mean(arr)),
        "geomean": geomean,
        "ci95_low": lo,
        "ci95_high": hi,
    }


def aggregate(spec: ExperimentSpec, runs: list) -> list:
    """Per (algorithm, checkpoint) statistics over the successful runs.

    Runs stopped early by target_gap can have shorter checkpoint grids, so
    each checkpoint aggregates only the runs that actually reached it.
    """
    out = []
    for alias in spec.algorithms:
        ok = [r for r in runs if r["algorithm"] == alias and r["status"] == "ok"]
        if not ok:
            continue
        grid = sorted({cp["t"] for r in ok for cp in r["checkpoints"]})
        for t in grid:
            cells = [
                cp for r in ok for cp in r["checkpoints"] if cp["t"] == t
            ]
            out.append(
                {
                    "algorithm": alias,
                    "t": t,
                    "count": len(cells),
                    "gap_avg": _stats([c["gap_avg"] for c in cells]),
                    "gap_last": _stats([c["gap_last"] for c in cells]),
                    "wall_time_ns": {
                        "mean": float(np.mean([c["wall_time_ns"] for c in cells]))
                    },
                }
            )
    return out


def run_suite(spec: ExperimentSpec, max_workers: int | None = None) -> dict:
    """Execute the full suite and assemble the comparison report."""
    spec.validate()
    workers = worker_count(max_workers)
    tasks = [
        (g, alias) for g in range(spec.games) for alias in spec.algorithms
    ]
    if workers == 1:
        results = [execute_run(spec, g, alias) for g, alias in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(execute_run, spec, g, a) for g, a in tasks]
            results = [f.result() for f in futures]
    order = {alias: i for i, alias in enumerate(spec.algorithms)}
    results.sort(key=lambda r: (r["game_index"], order[r["algorithm"]]))
    failures = sum(1 for r in results if r["status"] != "ok")
    return {
        "format_version": REPORT_FORMAT_VERSION,
        "experiment": {
            "n": spec.n,
            "m": spec.m,
            "games": spec.games,
            "master_seed": spec.master_seed,
            "algorithms": list(spec.algorithms),
            "iters": spec.iters,
            "outcomes": spec.outcomes,
            "checkpoints": None if spec.checkpoints is None else list(spec.checkpoints),
            "check_interval": spec.check_interval,
            "step_size": spec.step_size,
            "target_gap": spec.target_gap,
        },
        "ci_method": "student-t-95-log-domain",
        "runs": results,
        "aggregates": aggregate(spec, results),
        "failures": failures,
    }
