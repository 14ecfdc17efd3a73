"""Positional-encoding tables from supra-Laplacian or per-layer eigenvectors.

Variants: E (iterative solver run to convergence), I (iteration-capped
approximate solve), T (concatenation of all intermediate iterates).  Tables
key encodings by (time step, node id) and serialize to a plain text format
that round-trips exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from supralap.eigensolve import (
    SolverConfig,
    build_trajectory,
    dense_reference,
    lanczos,
    lobpcg,
)
from supralap.supra import (
    add_global_nodes,
    build_supra_adjacency,
    laplacian_from_adjacency,
    layer_laplacians,
)
from supralap.temporal_graph import TemporalGraph, Window, slice_window

log = logging.getLogger(__name__)

VARIANTS = ("E", "I", "T")

#: Eigenvalues below this are treated as trivial when --drop-trivial is set.
TRIVIAL_EIGENVALUE = 1e-10


@dataclass(frozen=True)
class PETable:
    """Positional encodings keyed by (time step, node id)."""

    entries: dict[tuple[int, int], np.ndarray]
    c: int
    variant: str  # e.g. "SLPE-E", "LPE-T"
    k: int
    include_eigenvalues: bool
    window: Window
    solver_meta: SolverConfig
    converged: bool = True
    padded: bool = False
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for key, vec in self.entries.items():
            if vec.shape != (self.c,):
                raise ValueError(
                    f"entry {key} has width {vec.shape}, expected ({self.c},)"
                )

    def __len__(self):
        return len(self.entries)

    def matrix(self):
        """Rows sorted by (t, node); returns (keys, rows) for inspection."""
        keys = sorted(self.entries)
        return keys, np.array([self.entries[k] for k in keys])


def _check_variant(variant: str) -> str:
    v = variant.upper()
    if v not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return v


def _solve(lap, cfg: SolverConfig, variant: str, notes: list[str]):
    """Dispatch one Laplacian to the solver matching the variant."""
    rows = lap.rows
    if variant == "E":
        return lanczos(lap, cfg)
    capped = replace(cfg, capture_trajectory=(variant == "T"))
    if cfg.k > rows // 2:
        # Block method infeasible on tiny matrices; fall back to the dense
        # reference rather than failing the whole table.
        notes.append(f"dense fallback for {rows}-row matrix (k={cfg.k})")
        return dense_reference(lap, min(cfg.k, rows))
    return lobpcg(lap, capped)


def _pe_matrix(result, variant, include_eigenvalues, drop_trivial, sign_seed):
    """Eigenvector matrix (rows x c) for one solved Laplacian."""
    if variant == "T":
        if not result.trajectory:
            # Dense fallback or converged-at-entry run: single snapshot.
            traj_result = replace(
                result, trajectory=((result.values, result.vectors),)
            )
        else:
            traj_result = result
        keep = None
        if drop_trivial:
            keep = np.where(result.values >= TRIVIAL_EIGENVALUE)[0]
            traj_result = replace(
                traj_result,
                trajectory=tuple(
                    (v[keep], X[:, keep]) for v, X in traj_result.trajectory
                ),
            )
        vals, vecs = build_trajectory(traj_result, sign_seed)
        mat = vecs
        eigvals = vals
    else:
        vecs = result.vectors
        vals = result.values
        if drop_trivial:
            keep = np.where(vals >= TRIVIAL_EIGENVALUE)[0]
            vecs = vecs[:, keep]
            vals = vals[keep]
        mat = vecs
        eigvals = vals
    if include_eigenvalues:
        mat = np.hstack([mat, np.tile(eigvals, (mat.shape[0], 1))])
    return mat


def compute_slpe(
    g: TemporalGraph,
    w: Window,
    cfg: SolverConfig,
    variant: str = "E",
    mu: float = 1.0,
    *,
    global_nodes: bool = True,
    reduced: bool = True,
    include_eigenvalues: bool = False,
    keep_global: bool = False,
    drop_trivial: bool = False,
    use_weights: bool = False,
) -> PETable:
    """Supra-Laplacian PEs for the window ``w``.

    Pipeline: slice, optional global-node augmentation, reduced
    supra-adjacency, Laplacian, eigensolve per variant, then scatter of supra
    rows back to (t, node) keys through the index map.  Global-node rows are
    excluded from the table unless ``keep_global``.
    """
    variant = _check_variant(variant)
    notes: list[str] = []
    gw = slice_window(g, w)
    if global_nodes:
        gw = add_global_nodes(gw)
    adj = build_supra_adjacency(
        gw, mu=mu, reduced=reduced, use_weights=use_weights
    )
    lap = laplacian_from_adjacency(adj)
    if lap.is_empty:
        raise ValueError("all layers in the window are edgeless")
    result = _solve(lap, cfg, variant, notes)
    if not result.converged:
        notes.append(f"solver did not converge ({result.method})")
    mat = _pe_matrix(
        result, variant, include_eigenvalues, drop_trivial, cfg.seed
    )

    gids = set(gw.global_node_ids or ())
    entries = {}
    for r, (t, node) in enumerate(lap.index_map.entries):
        if node in gids and not keep_global:
            continue
        entries[(t, node)] = mat[r].copy()
    return PETable(
        entries=entries,
        c=mat.shape[1],
        variant=f"SLPE-{variant}",
        k=cfg.k,
        include_eigenvalues=include_eigenvalues,
        window=w,
        solver_meta=cfg,
        converged=result.converged,
        notes=tuple(notes),
    )


def compute_lpe(
    g: TemporalGraph,
    w: Window,
    cfg: SolverConfig,
    variant: str = "E",
    *,
    global_nodes: bool = True,
    reduced: bool = True,
    include_eigenvalues: bool = False,
    keep_global: bool = False,
    use_weights: bool = False,
) -> PETable:
    """Independent per-layer Laplacian PEs over the window ``w``.

    Each layer is solved separately with a layer-specific seed; per-layer
    eigenvector signs are randomized.  Layers with fewer than k rows are
    zero-padded to width k and flagged.  Trajectory (T) tables pad shorter
    per-layer trajectories by repeating the final iterate so all rows share
    one width.
    """
    variant = _check_variant(variant)
    notes: list[str] = []
    gw = slice_window(g, w)
    laps = layer_laplacians(
        gw, reduced=reduced, global_nodes=global_nodes, use_weights=use_weights
    )
    k = cfg.k
    sign_rng = np.random.default_rng(cfg.seed)
    per_layer = []
    padded = False
    all_converged = True
    for t, lap in enumerate(laps):
        if lap.is_empty:
            per_layer.append((t, lap, None, None))
            continue
        k_eff = min(k, lap.rows)
        if k_eff < k:
            padded = True
        layer_cfg = replace(cfg, k=k_eff, seed=cfg.seed + 1000 * (t + 1))
        result = _solve(lap, layer_cfg, variant, notes)
        if not result.converged:
            all_converged = False
        signs = sign_rng.choice(np.array([-1.0, 1.0]), size=k_eff)
        per_layer.append((t, lap, result, signs))

    if variant == "T":
        K = max(
            (
                len(res.trajectory) if res is not None and res.trajectory else 1
                for _, _, res, _ in per_layer
            ),
            default=1,
        )
        width_k = K * k
    else:
        K = 1
        width_k = k
    c = width_k * (2 if include_eigenvalues else 1)

    entries = {}
    global_set = set(gw.global_node_ids or ())
    # Layer Laplacians index their own local global node as the last id.
    for t, lap, result, signs in per_layer:
        if result is None:
            continue
        k_eff = signs.size
        if variant == "T":
            traj = result.trajectory or ((result.values, result.vectors),)
            traj = list(traj)
            while len(traj) < K:
                traj.append(traj[-1])
            padded_res = replace(result, trajectory=tuple(traj))
            vals, vecs = build_trajectory(padded_res, cfg.seed + t)
            vecs = vecs * np.tile(signs, K)[None, :]
        else:
            vals = result.values
            vecs = result.vectors * signs[None, :]
        full_vecs = np.zeros((lap.rows, width_k))
        full_vals = np.zeros(width_k)
        # Place each iterate's k_eff columns at the start of its k-wide slot.
        for blk in range(vecs.shape[1] // k_eff):
            full_vecs[:, blk * k : blk * k + k_eff] = vecs[
                :, blk * k_eff : (blk + 1) * k_eff
            ]
            full_vals[blk * k : blk * k + k_eff] = vals[
                blk * k_eff : (blk + 1) * k_eff
            ]
        if k_eff < k:
            notes.append(f"layer {t}: {k_eff} eigenpairs, zero-padded to {k}")
        mat = full_vecs
        if include_eigenvalues:
            mat = np.hstack([mat, np.tile(full_vals, (mat.shape[0], 1))])
        # Single-layer index maps always use t=0; rekey to the window step.
        for r, (_, node) in enumerate(lap.index_map.entries):
            is_global = node in global_set or (
                global_nodes and node >= gw.universe_size
            )
            if is_global and not keep_global:
                continue
            entries[(t, node)] = mat[r].copy()

    return PETable(
        entries=entries,
        c=c,
        variant=f"LPE-{variant}",
        k=k,
        include_eigenvalues=include_eigenvalues,
        window=w,
        solver_meta=cfg,
        converged=all_converged,
        padded=padded,
        notes=tuple(notes),
    )


def concat_features(features, pe: PETable, t: int, pad_missing: bool = False):
    """Channel-wise concatenation of node features with PEs at time ``t``.

    Features come first.  Nodes without a PE entry get zero padding when
    ``pad_missing`` is set and are omitted otherwise.  Every node with a PE
    entry at ``t`` must appear in ``features``.
    """
    widths = {np.asarray(v).shape[0] for v in features.values()}
    if len(widths) > 1:
        raise ValueError(f"inconsistent feature widths: {sorted(widths)}")
    pe_nodes = {node for (tt, node) in pe.entries if tt == t}
    missing = pe_nodes - set(features)
    if missing:
        raise ValueError(f"missing feature row for nodes {sorted(missing)}")
    out = {}
    zero = np.zeros(pe.c)
    for node, feat in features.items():
        feat = np.asarray(feat, dtype=float)
        if (t, node) in pe.entries:
            out[node] = np.concatenate([feat, pe.entries[(t, node)]])
        elif pad_missing:
            out[node] = np.concatenate([feat, zero])
    return out


def save_pe(pe: PETable, path):
    """Serialize a table; 17 significant digits so reload is bit-exact."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"#pe variant={pe.variant} k={pe.k} c={pe.c} "
            f"window={pe.window.start},{pe.window.length} "
            f"seed={pe.solver_meta.seed}\n"
        )
        for (t, node) in sorted(pe.entries):
            vec = " ".join(f"{x:.17g}" for x in pe.entries[(t, node)])
            fh.write(f"{t} {node} {vec}\n")


def load_pe(path) -> PETable:
    """Read a table written by :func:`save_pe`."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("#pe "):
            raise ValueError(f"{path}: missing #pe header")
        meta = dict(kv.split("=", 1) for kv in header[4:].split())
        start, length = (int(x) for x in meta["window"].split(","))
        entries = {}
        for line in fh:
            parts = line.split()
            t, node = int(parts[0]), int(parts[1])
            entries[(t, node)] = np.array([float(x) for x in parts[2:]])
    k = int(meta["k"])
    return PETable(
        entries=entries,
        c=int(meta["c"]),
        variant=meta["variant"],
        k=k,
        include_eigenvalues=False,
        window=Window(start, length),
        solver_meta=SolverConfig(k=k, seed=int(meta["seed"])),
    )


class _LaplacianPEBase(BaseEstimator, TransformerMixin):
    """Shared sklearn-style facade over the PE pipelines.

    ``fit`` validates the temporal graph; ``transform`` computes a
    :class:`PETable` over the most recent ``window_size`` snapshots.
    """

    def __init__(
        self,
        k=8,
        window_size=3,
        variant="E",
        mu=1.0,
        tol=1e-8,
        maxiter=20,
        seed=0,
        include_eigenvalues=False,
        global_nodes=True,
        reduced=True,
    ):
        self.k = k
        self.window_size = window_size
        self.variant = variant
        self.mu = mu
        self.tol = tol
        self.maxiter = maxiter
        self.seed = seed
        self.include_eigenvalues = include_eigenvalues
        self.global_nodes = global_nodes
        self.reduced = reduced

    def _validate(self, g):
        if not isinstance(g, TemporalGraph):
            raise TypeError("expected a TemporalGraph")
        if g.num_snapshots < self.window_size:
            raise ValueError(
                f"graph has {g.num_snapshots} snapshots, window_size is "
                f"{self.window_size}"
            )
        _check_variant(self.variant)
        return g

    def fit(self, X, y=None):
        g = self._validate(X)
        self.n_snapshots_ = g.num_snapshots
        self.universe_size_ = g.universe_size
        return self

    def _window(self, g):
        return Window(g.num_snapshots - self.window_size, self.window_size)

    def _config(self):
        return SolverConfig(
            k=self.k, tol=self.tol, maxiter=self.maxiter, seed=self.seed
        )


class SupraLaplacianPE(_LaplacianPEBase):
    """Supra-Laplacian positional encodings as a transformer."""

    def transform(self, X) -> PETable:
        g = self._validate(X)
        return compute_slpe(
            g,
            self._window(g),
            self._config(),
            variant=self.variant,
            mu=self.mu,
            global_nodes=self.global_nodes,
            reduced=self.reduced,
            include_eigenvalues=self.include_eigenvalues,
        )


class LayerLaplacianPE(_LaplacianPEBase):
    """Independent per-layer Laplacian positional encodings as a transformer."""

    def transform(self, X) -> PETable:
        g = self._validate(X)
        return compute_lpe(
            g,
            self._window(g),
            self._config(),
            variant=self.variant,
            global_nodes=self.global_nodes,
            reduced=self.reduced,
            include_eigenvalues=self.include_eigenvalues,
        )
