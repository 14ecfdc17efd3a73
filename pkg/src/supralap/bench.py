"""Solver timing harness on synthetic preferential-attachment temporal graphs.

Each layer is an independent Barabasi-Albert graph on the same node set, so
every node is active in every layer and the supra coupling is complete.
Timing covers the eigensolve only; matrix assembly is excluded.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from supralap.eigensolve import (
    DENSE_CAP_DEFAULT,
    SolverConfig,
    dense_reference,
    lanczos,
    lobpcg,
)
from supralap.supra import build_supra_adjacency, laplacian_from_adjacency
from supralap.temporal_graph import TemporalGraph, make_snapshot

log = logging.getLogger(__name__)

SOLVERS = ("dense", "lanczos", "lobpcg")


@dataclass(frozen=True)
class BenchSpec:
    sizes: tuple[int, ...]
    ba_m: int = 3
    T: int = 3
    k: int = 8
    repeats: int = 5
    solvers: tuple[str, ...] = ("lanczos", "lobpcg")
    solver_cfgs: dict[str, SolverConfig] | None = None
    mu: float = 1.0
    seed: int = 0
    dense_cap: int = DENSE_CAP_DEFAULT

    def __post_init__(self):
        if not self.sizes or list(self.sizes) != sorted(self.sizes):
            raise ValueError("sizes must be positive and ascending")
        if min(self.sizes) < 1:
            raise ValueError("sizes must be positive")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        for s in self.solvers:
            if s not in SOLVERS:
                raise ValueError(f"unknown solver {s!r}")

    def config_for(self, solver: str, rows: int) -> SolverConfig:
        if self.solver_cfgs and solver in self.solver_cfgs:
            return self.solver_cfgs[solver]
        if solver == "lanczos":
            # Converged regime: generous matvec budget.
            return SolverConfig(k=self.k, tol=1e-8, maxiter=max(100000, rows))
        return SolverConfig(k=self.k, tol=1e-8, maxiter=20)


@dataclass(frozen=True)
class BenchRow:
    size: int
    solver: str
    median_ms: float | None
    min_ms: float | None
    max_ms: float | None
    residual_max: float | None
    converged: bool | None
    error: str | None = None


@dataclass(frozen=True)
class BenchReport:
    target: str
    rows: tuple[BenchRow, ...]
    speedups: dict[int, float] = field(default_factory=dict)

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                [
                    "size",
                    "solver",
                    "median_ms",
                    "min_ms",
                    "max_ms",
                    "residual_max",
                    "converged",
                ]
            )
            for r in self.rows:
                if r.error is not None:
                    writer.writerow([r.size, r.solver, "", "", "", "", r.error])
                else:
                    writer.writerow(
                        [
                            r.size,
                            r.solver,
                            f"{r.median_ms:.6f}",
                            f"{r.min_ms:.6f}",
                            f"{r.max_ms:.6f}",
                            f"{r.residual_max:.17g}",
                            r.converged,
                        ]
                    )


def generate_ba_temporal(n, m, T, seed) -> TemporalGraph:
    """T independent preferential-attachment layers on n shared nodes.

    Convention: m seed nodes with no edges; the first added node connects to
    all seed nodes, later nodes to m distinct targets drawn proportionally
    to degree (repeated-endpoints sampling).  Every layer therefore has
    exactly (n - m) * m edges and all n nodes active.
    """
    if not n > m >= 1:
        raise ValueError("need n > m >= 1")
    rng = np.random.default_rng(seed)
    snaps = []
    for t in range(T):
        edges = []
        repeated: list[int] = []
        targets = list(range(m))
        for new in range(m, n):
            for tgt in targets:
                edges.append((new, tgt))
                repeated.append(new)
                repeated.append(tgt)
            # Sample m distinct targets by preferential attachment.
            chosen: set[int] = set()
            while len(chosen) < m:
                chosen.add(repeated[rng.integers(len(repeated))])
            targets = sorted(chosen)
        snaps.append(make_snapshot(t, edges))
    return TemporalGraph(
        snapshots=tuple(snaps),
        universe_size=n,
        name=f"ba-n{n}-m{m}-T{T}-s{seed}",
    )


def _solve_once(solver, lap, cfg, dense_cap):
    if solver == "dense":
        return dense_reference(lap, cfg.k, dense_cap=dense_cap)
    if solver == "lanczos":
        return lanczos(lap, cfg)
    return lobpcg(lap, cfg)


def run_bench(spec: BenchSpec, target: str = "supra") -> BenchReport:
    """Time the configured solvers over the size sweep.

    ``target`` selects the supra-Laplacian over T layers or the first
    layer's plain Laplacian.  Each (size, solver) pair gets one warm-up run
    plus ``repeats`` timed runs; failures are recorded per row, never abort
    the sweep.
    """
    if target not in ("supra", "single-layer"):
        raise ValueError(f"unknown target {target!r}")
    rows: list[BenchRow] = []
    for size in spec.sizes:
        T = spec.T if target == "supra" else 1
        g = generate_ba_temporal(size, spec.ba_m, T, seed=spec.seed)
        adj = build_supra_adjacency(g, mu=spec.mu, reduced=True)
        lap = laplacian_from_adjacency(adj)
        log.info("bench size=%d target=%s rows=%d", size, target, lap.rows)
        for solver in spec.solvers:
            cfg = spec.config_for(solver, lap.rows)
            if solver == "dense" and lap.rows > spec.dense_cap:
                rows.append(
                    BenchRow(
                        size=size,
                        solver=solver,
                        median_ms=None,
                        min_ms=None,
                        max_ms=None,
                        residual_max=None,
                        converged=None,
                        error="dense budget",
                    )
                )
                continue
            try:
                _solve_once(solver, lap, cfg, spec.dense_cap)  # warm-up
                times = []
                result = None
                for _ in range(spec.repeats):
                    t0 = time.perf_counter()
                    result = _solve_once(solver, lap, cfg, spec.dense_cap)
                    times.append((time.perf_counter() - t0) * 1000.0)
            except Exception as exc:  # noqa: BLE001 - per-row capture
                log.warning("bench %s @ %d failed: %s", solver, size, exc)
                rows.append(
                    BenchRow(
                        size=size,
                        solver=solver,
                        median_ms=None,
                        min_ms=None,
                        max_ms=None,
                        residual_max=None,
                        converged=None,
                        error=str(exc),
                    )
                )
                continue
            rows.append(
                BenchRow(
                    size=size,
                    solver=solver,
                    median_ms=float(np.median(times)),
                    min_ms=float(np.min(times)),
                    max_ms=float(np.max(times)),
                    residual_max=float(result.residual_norms.max()),
                    converged=bool(result.converged),
                )
            )
    speedups = {}
    for size in spec.sizes:
        by_solver = {
            r.solver: r for r in rows if r.size == size and r.error is None
        }
        if "lanczos" in by_solver and "lobpcg" in by_solver:
            speedups[size] = (
                by_solver["lanczos"].median_ms / by_solver["lobpcg"].median_ms
            )
    return BenchReport(target=target, rows=tuple(rows), speedups=speedups)
