"""Smallest-eigenpair solvers for sparse symmetric PSD matrices.

Three strategies share one result type:

* :func:`dense_reference` - full dense decomposition, the oracle the two
  iterative solvers are validated against;
* :func:`lanczos` - thick-restarted Lanczos with full reorthogonalization
  and locking of converged pairs, run to convergence for exact encodings;
* :func:`lobpcg` - block [X, R, P] Rayleigh-Ritz iteration without a
  preconditioner, iteration-capped for inexact encodings, with optional
  per-iteration trajectory capture.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

log = logging.getLogger(__name__)

INIT_MODES = ("normal", "rademacher", "uniform", "warm-start-from-previous")

#: Dense solves above this many rows are refused, never silently attempted.
DENSE_CAP_DEFAULT = 5000


class DenseBudgetError(RuntimeError):
    """Matrix too large for the dense reference solver."""


@dataclass(frozen=True)
class SolverConfig:
    """Configuration shared by the iterative solvers."""

    k: int
    tol: float = 1e-8
    maxiter: int = 20
    seed: int = 0
    init: str = "normal"
    capture_trajectory: bool = False
    warm_start: np.ndarray | None = None
    # Refuse trajectory capture when maxiter * k * rows exceeds this.
    trajectory_budget: int = 10**8

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.maxiter < 1:
            raise ValueError("maxiter must be >= 1")
        if self.init not in INIT_MODES:
            raise ValueError(f"unknown init mode {self.init!r}")
        if self.init == "warm-start-from-previous" and self.warm_start is None:
            raise ValueError("warm-start init requires a warm_start block")


@dataclass(frozen=True)
class EigenResult:
    """Eigenpair estimates plus convergence metadata.

    ``values`` are ascending; column ``j`` of ``vectors`` pairs with
    ``values[j]`` and has unit norm.  ``trajectory`` holds one
    ``(values, vectors)`` snapshot per LOBPCG iteration when capture is on.
    """

    values: np.ndarray
    vectors: np.ndarray
    method: str
    iterations: int
    converged: bool
    residual_norms: np.ndarray
    trajectory: tuple | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)


def _as_csr(m) -> sp.csr_matrix:
    if hasattr(m, "data") and hasattr(m, "kind"):  # SupraMatrix
        return m.data
    if sp.issparse(m):
        return m.tocsr()
    return sp.csr_matrix(np.asarray(m, dtype=float))


def _init_block(rng, n, k, cfg: SolverConfig) -> np.ndarray:
    if cfg.init == "normal":
        X = rng.standard_normal((n, k))
    elif cfg.init == "rademacher":
        X = rng.choice(np.array([-1.0, 1.0]), size=(n, k))
    elif cfg.init == "uniform":
        X = rng.uniform(-1.0, 1.0, size=(n, k))
    else:
        X = np.array(cfg.warm_start, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape != (n, k):
            raise ValueError(
                f"warm_start has shape {X.shape}, expected ({n}, {k})"
            )
    return X


def _residuals(A, values, vectors) -> np.ndarray:
    R = A @ vectors - vectors * values[None, :]
    return np.linalg.norm(R, axis=0)


def dense_reference(m, k, dense_cap=DENSE_CAP_DEFAULT) -> EigenResult:
    """Full dense symmetric eigendecomposition, truncated to the k smallest.

    Serves as the correctness oracle for the iterative solvers.  Refuses
    matrices above ``dense_cap`` rows outright.
    """
    A = _as_csr(m)
    n = A.shape[0]
    if n > dense_cap:
        raise DenseBudgetError(
            f"{n} rows exceed the dense budget of {dense_cap}"
        )
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for {n} rows")
    w, V = np.linalg.eigh(A.toarray())
    values = w[:k].copy()
    vectors = V[:, :k].copy()
    return EigenResult(
        values=values,
        vectors=vectors,
        method="dense",
        iterations=0,
        converged=True,
        residual_norms=_residuals(A, values, vectors),
    )


def _orthonormalize_against(v, *bases):
    """Two-pass Gram-Schmidt of v against the given orthonormal bases."""
    for _ in range(2):
        for B in bases:
            if B is not None and B.shape[1]:
                v = v - B @ (B.T @ v)
    nrm = np.linalg.norm(v)
    if nrm < 1e-13:
        return None
    return v / nrm


def lanczos(m, cfg: SolverConfig) -> EigenResult:
    """Thick-restarted Lanczos with full reorthogonalization.

    Expands a Krylov basis one matrix-vector product at a time, performing a
    Rayleigh-Ritz projection at each restart boundary; converged Ritz pairs
    are locked and deflated, and a zero-norm continuation vector (breakdown)
    is replaced by a fresh random vector orthogonal to everything found so
    far.  ``iterations`` counts basis-expansion matrix-vector products.  The
    cap is overrun by the minimum needed to produce k Ritz pairs, with
    ``converged=False``.  Trajectory capture records one Ritz snapshot per
    expansion step from the first step at which k pairs exist.
    """
    A = _as_csr(m)
    n = A.shape[0]
    k = cfg.k
    if n == 0:
        raise ValueError("empty matrix")
    if k > n:
        raise ValueError(f"k={k} exceeds matrix dimension {n}")
    rng = np.random.default_rng(cfg.seed)
    ncv = min(n, max(2 * k + 8, 40))
    # Lock well below the requested tolerance: deflation against locked
    # vectors leaks their residual into later pairs, so headroom is needed
    # for the final explicit residuals to stay under cfg.tol.
    lock_tol = 0.05 * cfg.tol

    V = np.zeros((n, ncv))
    H = np.zeros((ncv, ncv))
    j = 0
    locked_vals: list[float] = []
    locked_vecs = np.zeros((n, 0))
    notes: list[str] = []
    trajectory: list | None = [] if cfg.capture_trajectory else None
    matvecs = 0
    probed = False

    pending = _init_block(rng, n, 1, cfg)[:, 0]

    def fresh_vector():
        return rng.standard_normal(n)

    def ritz():
        theta, Y = np.linalg.eigh(H[:j, :j])
        return theta, Y

    while True:
        v = _orthonormalize_against(pending, V[:, :j], locked_vecs)
        attempts = 0
        while v is None:
            attempts += 1
            if attempts > 50 or j + len(locked_vals) >= n:
                break
            notes.append("breakdown-restart")
            v = _orthonormalize_against(fresh_vector(), V[:, :j], locked_vecs)
        exhausted = v is None  # locked + basis span the whole space
        if not exhausted:
            V[:, j] = v
            w = A @ v
            matvecs += 1
            if locked_vecs.shape[1]:
                w = w - locked_vecs @ (locked_vecs.T @ w)
            h = V[:, : j + 1].T @ w
            w = w - V[:, : j + 1] @ h
            h2 = V[:, : j + 1].T @ w
            w = w - V[:, : j + 1] @ h2
            if locked_vecs.shape[1]:
                w = w - locked_vecs @ (locked_vecs.T @ w)
            h = h + h2
            H[: j + 1, j] = h
            H[j, : j + 1] = h
            j += 1
            beta = np.linalg.norm(w)
            pending = w / beta if beta > 1e-13 else None

            if trajectory is not None and j + len(locked_vals) >= k:
                theta, Y = ritz()
                X = V[:, :j] @ Y
                snap_vals = np.concatenate([np.array(locked_vals), theta])
                snap_vecs = np.hstack([locked_vecs, X])
                order = np.argsort(snap_vals)[:k]
                trajectory.append(
                    (snap_vals[order].copy(), snap_vecs[:, order].copy())
                )
        else:
            beta = 0.0
            pending = None

        have_k = j + len(locked_vals) >= min(k, n)
        out_of_budget = matvecs >= cfg.maxiter and have_k
        if (
            not exhausted
            and j < ncv
            and pending is not None
            and not out_of_budget
        ):
            continue

        # Restart boundary: Rayleigh-Ritz, lock, compress.
        theta, Y = ritz()
        if pending is not None:
            res_est = beta * np.abs(Y[j - 1, :])
        else:
            res_est = np.zeros(j)
        k_rem = k - len(locked_vals)
        lock_idx = [
            i
            for i in range(min(j, max(k_rem, 0) + 3))
            if res_est[i] <= lock_tol
        ]
        keep_idx = [i for i in range(j) if i not in lock_idx]
        X = V[:, :j] @ Y
        if lock_idx:
            locked_vals.extend(theta[i] for i in lock_idx)
            locked_vecs = np.hstack([locked_vecs, X[:, lock_idx]])
            probed = False
        # Multiplicity guard: an eigenvalue copy living in the orthogonal
        # complement of the Krylov space explored so far is invisible to the
        # current Ritz values, so after the k-th lock run one verification
        # cycle seeded with a fresh random vector (which has weight in every
        # complement direction) and assemble only if it surfaces nothing
        # below the k-th smallest locked value.
        below = False
        if len(locked_vals) >= k:
            kth = np.sort(np.array(locked_vals))[k - 1]
            below = any(theta[i] < kth - cfg.tol for i in keep_idx)
        ready = len(locked_vals) >= k and not below
        if (ready and probed) or out_of_budget or exhausted:
            # Assemble the answer from locked plus current Ritz pairs.
            all_vals = np.concatenate([np.array(locked_vals), theta[keep_idx]])
            all_vecs = np.hstack([locked_vecs, X[:, keep_idx]])
            order = np.argsort(all_vals)[: min(k, all_vals.size)]
            values = all_vals[order]
            vectors = all_vecs[:, order]
            break
        n_keep = min(
            len(keep_idx), max(k_rem, min(ncv // 2, k_rem + 8), 1)
        )
        kept = keep_idx[:n_keep]
        V[:, : len(kept)] = X[:, kept]
        H[:, :] = 0.0
        H[: len(kept), : len(kept)] = np.diag(theta[kept])
        j = len(kept)
        if ready:
            # Verification cycle: continue from a fresh random direction so
            # the deflated complement actually gets explored.
            probed = True
            pending = fresh_vector()
        elif pending is None:
            pending = fresh_vector()

    if values.size < k:
        raise RuntimeError(
            f"only {values.size} eigenpairs available for k={k}"
        )
    residual_norms = _residuals(A, values, vectors)
    converged = bool(np.all(residual_norms <= cfg.tol))
    if not converged:
        log.warning(
            "lanczos did not converge: %d matvecs, max residual %.3e",
            matvecs,
            residual_norms.max(),
        )
    return EigenResult(
        values=values,
        vectors=vectors,
        method="lanczos",
        iterations=matvecs,
        converged=converged,
        residual_norms=residual_norms,
        trajectory=tuple(trajectory) if trajectory is not None else None,
        notes=tuple(notes),
    )


def _orthonormal_basis(S, drop_tol=1e-12):
    """Orthonormal basis of the columns of S via SVD, with rank truncation."""
    U, s, _ = np.linalg.svd(S, full_matrices=False)
    rank = int(np.sum(s > s[0] * drop_tol)) if s.size else 0
    return U[:, :rank], rank < S.shape[1]


def lobpcg(m, cfg: SolverConfig) -> EigenResult:
    """Block [X, R, P] Rayleigh-Ritz iteration, no preconditioner.

    Stops at the residual tolerance or at ``maxiter`` block iterations.  An
    ill-conditioned trial basis drops the P block for that iteration (the
    standard basis-degeneration fallback); the event is recorded in
    ``notes``.  Rayleigh quotients are non-increasing per eigenindex because
    each trial subspace contains the current iterate block.
    """
    A = _as_csr(m)
    n = A.shape[0]
    k = cfg.k
    if n == 0:
        raise ValueError("empty matrix")
    if k > n // 2:
        raise ValueError(f"k={k} violates the block bound k <= rows/2 ({n} rows)")
    if cfg.capture_trajectory and cfg.maxiter * k * n > cfg.trajectory_budget:
        raise ValueError(
            "trajectory capture refused: maxiter*k*rows exceeds the element "
            f"budget of {cfg.trajectory_budget}"
        )
    rng = np.random.default_rng(cfg.seed)
    notes: list[str] = []

    X = _init_block(rng, n, k, cfg)
    X, _ = np.linalg.qr(X)
    AX = A @ X
    G = X.T @ AX
    theta, C = np.linalg.eigh((G + G.T) / 2)
    X = X @ C
    AX = AX @ C
    P = None
    trajectory: list = []

    it = 0
    while it < cfg.maxiter:
        R = AX - X * theta[None, :]
        if np.all(np.linalg.norm(R, axis=0) <= cfg.tol):
            break
        blocks = [X, R] if P is None else [X, R, P]
        S, truncated = _orthonormal_basis(np.hstack(blocks))
        if truncated and P is not None:
            notes.append(f"iter {it + 1}: dropped P block (degenerate basis)")
            S, _ = _orthonormal_basis(np.hstack([X, R]))
        AS = A @ S
        G = S.T @ AS
        theta_all, C = np.linalg.eigh((G + G.T) / 2)
        Y = C[:, :k]
        newX = S @ Y
        newAX = AS @ Y
        theta = theta_all[:k]
        P = newX - X @ (X.T @ newX)
        if np.linalg.norm(P) < 1e-14:
            P = None
        X, AX = newX, newAX
        it += 1
        if cfg.capture_trajectory:
            trajectory.append((theta.copy(), X.copy()))

    residual_norms = _residuals(A, theta, X)
    converged = bool(np.all(residual_norms <= cfg.tol))
    return EigenResult(
        values=theta.copy(),
        vectors=X,
        method="lobpcg",
        iterations=it,
        converged=converged,
        residual_norms=residual_norms,
        trajectory=tuple(trajectory) if cfg.capture_trajectory else None,
        notes=tuple(notes),
    )


def build_trajectory(result: EigenResult, sign_seed: int):
    """Concatenate per-iteration eigenpair snapshots with consistent signs.

    One random sign per eigenvector index is drawn from ``sign_seed``.  Each
    snapshot column is first aligned to the final iterate's column (flipped
    if their inner product is negative) so the random sign is applied
    consistently along the whole trajectory.  Returns
    ``(values_concat, vectors_concat)`` ordered iteration 1..K.
    """
    if not result.trajectory:
        raise ValueError("result carries no trajectory")
    final_vecs = result.trajectory[-1][1]
    k = final_vecs.shape[1]
    rng = np.random.default_rng(sign_seed)
    signs = rng.choice(np.array([-1.0, 1.0]), size=k)
    val_parts, vec_parts = [], []
    for vals, vecs in result.trajectory:
        flip = np.where(np.sum(vecs * final_vecs, axis=0) < 0, -1.0, 1.0)
        vec_parts.append(vecs * (flip * signs)[None, :])
        val_parts.append(np.asarray(vals, dtype=float))
    return np.concatenate(val_parts), np.hstack(vec_parts)
