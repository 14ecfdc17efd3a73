"""Supra-adjacency / supra-Laplacian construction for windowed temporal graphs.

The supra matrix stacks per-layer adjacencies on the block diagonal and
couples node ``v`` in adjacent layers with weight ``mu``.  Two layouts are
supported: *full* (every (layer, node) pair of the universe gets a row and
all adjacent-layer pairs are coupled) and *reduced* (only nodes active in
their layer get a row, and couplings require activity in both layers).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from supralap.temporal_graph import Snapshot, TemporalGraph

log = logging.getLogger(__name__)

#: Absolute tolerance for the Laplacian zero-row-sum invariant.
ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class SupraIndexMap:
    """Maps supra-matrix rows to (layer, original node id) pairs and back."""

    entries: tuple[tuple[int, int], ...]
    global_rows: dict[int, int] | None = None

    def __post_init__(self):
        if list(self.entries) != sorted(self.entries):
            raise ValueError("index map entries must be sorted by (t, node)")
        object.__setattr__(
            self, "_pos", {tn: i for i, tn in enumerate(self.entries)}
        )

    def row_of(self, t: int, node: int) -> int:
        return self._pos[(t, node)]

    def __contains__(self, tn) -> bool:
        return tn in self._pos

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class SupraMatrix:
    """Sparse symmetric supra matrix plus its row index map.

    ``data`` is a CSR matrix in canonical form (sorted indices, no
    duplicates), which fixes the on-disk triplet order.
    """

    data: sp.csr_matrix
    kind: str  # "adjacency" | "laplacian"
    index_map: SupraIndexMap
    mu: float

    def __post_init__(self):
        if self.kind not in ("adjacency", "laplacian"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.data.shape[0] != self.data.shape[1]:
            raise ValueError("supra matrix must be square")
        if self.data.shape[0] != len(self.index_map):
            raise ValueError("index map size does not match matrix dimension")

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def nnz(self) -> int:
        return self.data.nnz

    @property
    def is_empty(self) -> bool:
        return self.rows == 0

    def toarray(self) -> np.ndarray:
        return self.data.toarray()


def _canonical_csr(rows, cols, vals, n) -> sp.csr_matrix:
    m = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    m.sum_duplicates()
    m.sort_indices()
    m.eliminate_zeros()
    return m


def add_global_nodes(g: TemporalGraph) -> TemporalGraph:
    """Augment every layer with a global node linked to its active nodes.

    Layer ``t`` receives the fresh node id ``universe_size + t`` connected
    with weight 1.0 to each active node of that layer.  A layer with no edges
    gets an isolated global node (dropped later by reduction).
    """
    if g.num_snapshots == 0:
        raise ValueError("empty temporal graph")
    if g.global_node_ids is not None:
        raise ValueError("graph already carries global nodes")
    U = g.universe_size
    snaps = []
    gids = []
    for s in g.snapshots:
        gid = U + s.t
        gids.append(gid)
        edges = dict(s.edges)
        for v in sorted(s.active_nodes):
            edges[(v, gid)] = 1.0
        snaps.append(Snapshot(t=s.t, edges=edges))
    return TemporalGraph(
        snapshots=tuple(snaps),
        universe_size=U + g.num_snapshots,
        name=g.name,
        source=g.source,
        id_map=g.id_map,
        global_node_ids=tuple(gids),
    )


def _layer_activity(g: TemporalGraph) -> list[frozenset[int]]:
    return [s.active_nodes for s in g.snapshots]


def build_supra_adjacency(
    g: TemporalGraph,
    mu: float = 1.0,
    reduced: bool = True,
    use_weights: bool = False,
) -> SupraMatrix:
    """Assemble the supra-adjacency of ``g`` with coupling weight ``mu``.

    In reduced mode only active (t, node) pairs get rows, and the coupling
    (t,v)-(t+1,v) exists only when v is active in both layers.  Global nodes
    of consecutive non-empty layers are chained with the same coupling even
    though their ids differ per layer.
    """
    if g.num_snapshots == 0:
        raise ValueError("empty temporal graph")
    if mu <= 0:
        raise ValueError("mu must be positive")
    T = g.num_snapshots
    U = g.universe_size
    active = _layer_activity(g)
    global_ids = set(g.global_node_ids or ())

    if reduced:
        entries = [(t, v) for t in range(T) for v in sorted(active[t])]
    else:
        entries = [(t, v) for t in range(T) for v in range(U)]
    index_map = SupraIndexMap(
        entries=tuple(entries),
        global_rows=(
            {
                t: entries.index((t, gid))
                for t, gid in enumerate(g.global_node_ids)
                if (t, gid) in set(entries)
            }
            if g.global_node_ids is not None
            else None
        ),
    )
    pos = {tn: i for i, tn in enumerate(entries)}

    ri, ci, vv = [], [], []

    def put(a, b, w):
        ri.append(a)
        ci.append(b)
        vv.append(w)
        ri.append(b)
        ci.append(a)
        vv.append(w)

    for t, s in enumerate(g.snapshots):
        for (u, v), w in s.edges.items():
            put(pos[(t, u)], pos[(t, v)], w if use_weights else 1.0)

    for t in range(T - 1):
        if reduced:
            shared = active[t] & active[t + 1]
        else:
            shared = set(range(U))
        for v in sorted(shared):
            put(pos[(t, v)], pos[(t + 1, v)], mu)
        # Per-layer global nodes are one conceptual node with time-varying
        # ids; chain them across non-empty adjacent layers.
        if g.global_node_ids is not None:
            ga, gb = g.global_node_ids[t], g.global_node_ids[t + 1]
            a_act = ga in active[t]
            b_act = gb in active[t + 1]
            if a_act and b_act:
                put(pos[(t, ga)], pos[(t + 1, gb)], mu)

    mat = _canonical_csr(ri, ci, vv, len(entries))

    if reduced:
        # Rows in reduced mode come from active nodes only, so every row has
        # intra-layer degree >= 1 already; nothing further to drop.
        pass
    return SupraMatrix(data=mat, kind="adjacency", index_map=index_map, mu=mu)


def laplacian_from_adjacency(a: SupraMatrix) -> SupraMatrix:
    """Degree-minus-adjacency Laplacian of a supra-adjacency matrix."""
    if a.kind != "adjacency":
        raise ValueError("input must be an adjacency supra matrix")
    deg = np.asarray(a.data.sum(axis=1)).ravel()
    lap = sp.diags(deg, format="csr") - a.data
    lap = lap.tocsr()
    lap.sum_duplicates()
    lap.sort_indices()
    return replace(a, data=lap, kind="laplacian")


def layer_laplacians(
    g: TemporalGraph,
    reduced: bool = True,
    global_nodes: bool = True,
    use_weights: bool = False,
) -> list[SupraMatrix]:
    """Per-snapshot Laplacians with the same graph modifications as the
    supra path (global-node augmentation, isolated-node removal).

    A layer whose reduced matrix has no rows is returned as an empty 0x0
    matrix.
    """
    if g.num_snapshots == 0:
        raise ValueError("empty temporal graph")
    out = []
    for s in g.snapshots:
        single = TemporalGraph(
            snapshots=(Snapshot(t=0, edges=dict(s.edges)),),
            universe_size=g.universe_size,
            name=f"{g.name}[t={s.t}]",
        )
        if global_nodes:
            single = add_global_nodes(single)
        if single.snapshots[0].num_edges == 0 and reduced:
            empty = SupraMatrix(
                data=sp.csr_matrix((0, 0)),
                kind="laplacian",
                index_map=SupraIndexMap(entries=()),
                mu=1.0,
            )
            out.append(empty)
            continue
        adj = build_supra_adjacency(
            single, mu=1.0, reduced=reduced, use_weights=use_weights
        )
        out.append(laplacian_from_adjacency(adj))
    return out


def check_invariants(m: SupraMatrix):
    """Raise AssertionError if symmetry/Laplacian/adjacency invariants fail."""
    d = m.data
    asym = abs(d - d.T)
    if asym.nnz and asym.max() > 0:
        raise AssertionError("supra matrix is not symmetric")
    if m.kind == "laplacian":
        rs = np.asarray(d.sum(axis=1)).ravel()
        if m.rows and np.abs(rs).max() > ROW_SUM_TOL:
            raise AssertionError("laplacian row sums exceed tolerance")
        if m.rows and d.diagonal().min() < 0:
            raise AssertionError("laplacian diagonal has negative entries")
    else:
        if m.rows and np.abs(d.diagonal()).max() > 0:
            raise AssertionError("adjacency diagonal is not zero")
        if d.nnz and d.data.min() < 0:
            raise AssertionError("adjacency has negative entries")


def export_matrix(m: SupraMatrix, path):
    """Write the matrix as canonical triplets plus a row index map.

    Header: ``%%supra kind rows cols nnz mu``; then one ``row col value``
    triplet per line (row-major, ascending column, 17 significant digits).
    The index map goes to ``<path>.map`` as ``supra_row t node`` lines.
    """
    coo = m.data.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"%%supra {m.kind} {m.rows} {m.rows} {m.nnz} {m.mu:.17g}\n")
        for i in order:
            fh.write(f"{coo.row[i]} {coo.col[i]} {coo.data[i]:.17g}\n")
    with open(f"{path}.map", "w", encoding="utf-8") as fh:
        for r, (t, v) in enumerate(m.index_map.entries):
            fh.write(f"{r} {t} {v}\n")


def import_matrix(path) -> SupraMatrix:
    """Read a matrix written by :func:`export_matrix`."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 6 or header[0] != "%%supra":
            raise ValueError(f"{path}: bad supra matrix header")
        kind = header[1]
        n = int(header[2])
        nnz = int(header[4])
        mu = float(header[5])
        ri = np.empty(nnz, dtype=np.int64)
        ci = np.empty(nnz, dtype=np.int64)
        vv = np.empty(nnz, dtype=np.float64)
        for i in range(nnz):
            parts = fh.readline().split()
            ri[i], ci[i], vv[i] = int(parts[0]), int(parts[1]), float(parts[2])
    entries = []
    with open(f"{path}.map", "r", encoding="utf-8") as fh:
        for line in fh:
            _, t, v = line.split()
            entries.append((int(t), int(v)))
    mat = sp.csr_matrix((vv, (ri, ci)), shape=(n, n))
    mat.sum_duplicates()
    mat.sort_indices()
    return SupraMatrix(
        data=mat,
        kind=kind,
        index_map=SupraIndexMap(entries=tuple(entries)),
        mu=mu,
    )
