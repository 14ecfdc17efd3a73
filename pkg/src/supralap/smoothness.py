"""Smoothness objective for layer-wise encodings and its supra quadratic form.

The objective sums per-layer Laplacian quadratic forms plus a coupling
penalty on differences between consecutive layers' encoding blocks; for any
block matrix X it equals tr(X^T L_supra X) with the full (all nodes per
layer) supra-Laplacian.  Minimizers over orthonormal X are the smallest
supra-Laplacian eigenvectors.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from supralap.eigensolve import dense_reference

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SmoothnessReport:
    """Per-term breakdown of the layer-smoothness objective."""

    intra: tuple[float, ...]  # tr(X_t^T L_t X_t) per layer
    inter: tuple[float, ...]  # mu * ||X_t - X_{t-1}||_F^2 per transition
    total: float
    quad_form: float  # tr(X^T L_supra X)
    identity_gap: float


@dataclass(frozen=True)
class MinimalityReport:
    """Random orthonormal trials versus the eigenvector optimum."""

    optimum: float
    trials: int
    violations: int
    min_random: float | None
    median_random: float | None


def _to_csr(m) -> sp.csr_matrix:
    if hasattr(m, "data") and hasattr(m, "kind"):
        return m.data
    if sp.issparse(m):
        return m.tocsr()
    return sp.csr_matrix(np.asarray(m, dtype=float))


def assemble_block_supra_laplacian(layer_laps, mu) -> sp.csr_matrix:
    """Explicit block construction: L_t (+ mu or 2 mu on the diagonal)
    on the block diagonal, -mu I on the first off-diagonal blocks.

    All layers must share one dimension (full, non-reduced indexing).
    """
    laps = [_to_csr(L) for L in layer_laps]
    T = len(laps)
    if T == 0:
        raise ValueError("no layers")
    n = laps[0].shape[0]
    if any(L.shape != (n, n) for L in laps):
        raise ValueError("layers must share a common node set")
    eye = sp.identity(n, format="csr")
    blocks = [[None] * T for _ in range(T)]
    for t in range(T):
        shift = mu * (2.0 if 0 < t < T - 1 else 1.0) if T > 1 else 0.0
        blocks[t][t] = laps[t] + shift * eye
        if t + 1 < T:
            blocks[t][t + 1] = -mu * eye
            blocks[t + 1][t] = -mu * eye
    return sp.bmat(blocks, format="csr")


def evaluate_objective(layer_laps, X_blocks, mu) -> SmoothnessReport:
    """Evaluate the smoothness objective for per-layer blocks ``X_blocks``.

    ``layer_laps`` are full single-layer Laplacians over a common node set;
    ``X_blocks[t]`` is the rows x k encoding block of layer t.  The quadratic
    form is computed against the explicit block supra-Laplacian with coupling
    ``mu``; the identity gap between the two routes should vanish for any X.
    """
    laps = [_to_csr(L) for L in layer_laps]
    T = len(laps)
    if len(X_blocks) != T:
        raise ValueError(f"{len(X_blocks)} blocks for {T} layers")
    n = laps[0].shape[0]
    ks = {np.asarray(X).shape for X in X_blocks}
    if len({shape[1] for shape in ks}) > 1 or any(
        shape[0] != n for shape in ks
    ):
        raise ValueError("inconsistent block shapes")

    intra = []
    for L, X in zip(laps, X_blocks):
        X = np.asarray(X, dtype=float)
        intra.append(float(np.trace(X.T @ (L @ X))))
    inter = []
    for t in range(1, T):
        d = np.asarray(X_blocks[t], dtype=float) - np.asarray(
            X_blocks[t - 1], dtype=float
        )
        inter.append(float(mu * np.sum(d * d)))
    total = sum(intra) + sum(inter)

    X = np.vstack([np.asarray(b, dtype=float) for b in X_blocks])
    L_supra = assemble_block_supra_laplacian(laps, mu)
    quad = float(np.trace(X.T @ (L_supra @ X)))
    return SmoothnessReport(
        intra=tuple(intra),
        inter=tuple(inter),
        total=total,
        quad_form=quad,
        identity_gap=abs(total - quad),
    )


def random_orthonormal(rng, n, k) -> np.ndarray:
    """Haar-distributed orthonormal n x k matrix via QR of a Gaussian."""
    Q, R = np.linalg.qr(rng.standard_normal((n, k)))
    return Q * np.sign(np.diag(R))[None, :]


def check_minimality(m, k, trials, seed) -> MinimalityReport:
    """Compare random orthonormal objectives against the eigenvector optimum.

    Draws ``trials`` random orthonormal matrices and counts how many beat the
    sum of the k smallest eigenvalues by more than 1e-9 (expected: none, by
    the Rayleigh-Ritz bound).
    """
    L = _to_csr(m)
    n = L.shape[0]
    ref = dense_reference(L, min(k, n))
    optimum = float(np.sum(ref.values[:k]))
    if trials == 0:
        return MinimalityReport(
            optimum=optimum,
            trials=0,
            violations=0,
            min_random=None,
            median_random=None,
        )
    rng = np.random.default_rng(seed)
    objs = np.empty(trials)
    for i in range(trials):
        X = random_orthonormal(rng, n, k)
        objs[i] = np.trace(X.T @ (L @ X))
    violations = int(np.sum(objs < optimum - 1e-9))
    return MinimalityReport(
        optimum=optimum,
        trials=trials,
        violations=violations,
        min_random=float(objs.min()),
        median_random=float(np.median(objs)),
    )


def _path_laplacian(n) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for i in range(n - 1):
        rows += [i, i + 1]
        cols += [i + 1, i]
        vals += [-1.0, -1.0]
    L = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    deg = -np.asarray(L.sum(axis=1)).ravel()
    return (sp.diags(deg) + L).tocsr()


def inter_layer_consistency_demo(
    path_length, T, mu, k=2, seed=0, csv_path=None
):
    """Coupled versus uncoupled eigenvector smoothness on stacked paths.

    Builds T identical path layers; the coupled solve uses the supra
    Laplacian with coupling ``mu``, the uncoupled one solves each layer
    independently with random per-layer signs.  Returns the two inter-layer
    difference sums and optionally writes a plot-ready CSV with columns
    ``t, component, coupled_value, uncoupled_value`` holding the squared
    block differences per transition and eigencomponent.
    """
    if path_length < 2 or T < 2:
        raise ValueError("need path_length >= 2 and T >= 2")
    n = path_length
    L1 = _path_laplacian(n)
    laps = [L1] * T
    L_supra = assemble_block_supra_laplacian(laps, mu)
    coupled = dense_reference(L_supra, k)
    blocks_c = [coupled.vectors[t * n : (t + 1) * n] for t in range(T)]

    rng = np.random.default_rng(seed)
    ref = dense_reference(L1, k)
    blocks_u = []
    for _ in range(T):
        signs = rng.choice(np.array([-1.0, 1.0]), size=k)
        blocks_u.append(ref.vectors * signs[None, :])

    rows = []
    coup_sum = 0.0
    unc_sum = 0.0
    for t in range(1, T):
        dc = blocks_c[t] - blocks_c[t - 1]
        du = blocks_u[t] - blocks_u[t - 1]
        for j in range(k):
            cv = float(np.sum(dc[:, j] ** 2))
            uv = float(np.sum(du[:, j] ** 2))
            rows.append((t, j, cv, uv))
            coup_sum += cv
            unc_sum += uv
    if csv_path is not None:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["t", "component", "coupled_value", "uncoupled_value"]
            )
            writer.writerows(rows)
    return {
        "coupled_inter_sum": coup_sum,
        "uncoupled_inter_sum": unc_sum,
        "rows": rows,
    }
