"""Snapshot-based dynamic graph data model and edge-list ingestion.

A temporal graph is an ordered sequence of undirected snapshots over a shared
node universe with dense integer ids.  Edge lists are plain text, one record
per line: ``src dst timestamp [weight]``, ``#`` starts a comment.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, replace

log = logging.getLogger(__name__)


class EdgeListError(ValueError):
    """Raised when an edge-list file cannot be parsed or is degenerate."""


@dataclass(frozen=True)
class Snapshot:
    """One static graph observed at time step ``t``.

    ``edges`` maps unordered node pairs (stored as ``(min, max)`` tuples) to a
    scalar weight.  ``active_nodes`` is the set of endpoints of the edges.
    """

    t: int
    edges: dict[tuple[int, int], float]
    active_nodes: frozenset[int] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        endpoints = set()
        for (u, v), w in self.edges.items():
            if u == v:
                raise ValueError(f"self-loop ({u},{v}) at t={self.t}")
            if u > v:
                raise ValueError(f"edge ({u},{v}) not stored as (min,max)")
            if u < 0:
                raise ValueError(f"negative node id {u} at t={self.t}")
            endpoints.add(u)
            endpoints.add(v)
        if self.active_nodes is None:
            object.__setattr__(self, "active_nodes", frozenset(endpoints))
        elif frozenset(endpoints) != self.active_nodes:
            raise ValueError(
                f"active_nodes of snapshot t={self.t} do not match edge endpoints"
            )

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return sum(1 for (a, b) in self.edges if v in (a, b))


def make_snapshot(t, edge_iter, allow_self_loops=False):
    """Build a Snapshot from ``(u, v[, w])`` tuples, merging duplicates.

    Duplicate unordered pairs have their weights summed; missing weights
    default to 1.0.  Self-loops are rejected unless ``allow_self_loops`` is
    set, in which case they are silently dropped (they would distort the
    Laplacian degree terms).
    """
    edges: dict[tuple[int, int], float] = {}
    for rec in edge_iter:
        u, v = int(rec[0]), int(rec[1])
        w = float(rec[2]) if len(rec) > 2 else 1.0
        if u == v:
            if allow_self_loops:
                continue
            raise ValueError(f"self-loop on node {u} at t={t}")
        a, b = (u, v) if u < v else (v, u)
        edges[(a, b)] = edges.get((a, b), 0.0) + w
    return Snapshot(t=t, edges=edges)


@dataclass(frozen=True)
class TemporalGraph:
    """An immutable ordered sequence of snapshots over a shared node universe."""

    snapshots: tuple[Snapshot, ...]
    universe_size: int
    name: str = ""
    source: str = ""
    id_map: dict[int, int] | None = None
    # Node ids acting as per-layer global nodes (index = layer), if any.
    global_node_ids: tuple[int, ...] | None = None

    def __post_init__(self):
        for i, s in enumerate(self.snapshots):
            if s.t != i:
                raise ValueError(f"snapshot at position {i} has t={s.t}")
            for v in s.active_nodes:
                if v >= self.universe_size:
                    raise ValueError(
                        f"node id {v} >= universe_size {self.universe_size}"
                    )

    @property
    def num_snapshots(self) -> int:
        return len(self.snapshots)

    @property
    def num_edges(self) -> int:
        return sum(s.num_edges for s in self.snapshots)


@dataclass(frozen=True)
class Window:
    """A contiguous block of snapshots: ``length`` steps starting at ``start``."""

    start: int
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("window length must be >= 1")
        if self.start < 0:
            raise ValueError("window start must be >= 0")

    def validate(self, g: TemporalGraph):
        if self.start + self.length > g.num_snapshots:
            raise ValueError(
                f"window ({self.start},{self.length}) out of range for "
                f"T={g.num_snapshots}"
            )


def _parse_partitioning(partitioning: str) -> tuple[str, int]:
    if partitioning in ("distinct", "by-distinct-timestamp"):
        return "distinct", 0
    if partitioning.startswith("fixed:"):
        n = int(partitioning.split(":", 1)[1])
        if n < 1:
            raise ValueError("fixed:N requires N >= 1")
        return "fixed", n
    raise ValueError(f"unknown partitioning rule {partitioning!r}")


def ingest_edge_list(path, partitioning="distinct", name=None) -> TemporalGraph:
    """Read a timestamped edge list and bucket records into snapshots.

    ``partitioning`` is either ``"distinct"`` (one snapshot per distinct
    timestamp, in ascending order) or ``"fixed:N"`` (N buckets of equal
    timestamp range).  Node ids are remapped to a dense 0-based range; the
    mapping is recorded on the returned graph.
    """
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (3, 4):
                raise EdgeListError(
                    f"{path}:{lineno}: expected 'src dst timestamp [weight]', "
                    f"got {len(parts)} fields"
                )
            try:
                src, dst = int(parts[0]), int(parts[1])
                ts = float(parts[2])
                w = float(parts[3]) if len(parts) == 4 else 1.0
            except ValueError as exc:
                raise EdgeListError(f"{path}:{lineno}: {exc}") from exc
            if src < 0 or dst < 0:
                raise EdgeListError(f"{path}:{lineno}: negative node id")
            if src == dst:
                raise EdgeListError(f"{path}:{lineno}: self-loop on node {src}")
            records.append((src, dst, ts, w))
    if not records:
        raise EdgeListError(f"{path}: empty file")

    ids = sorted({r[0] for r in records} | {r[1] for r in records})
    id_map = {orig: dense for dense, orig in enumerate(ids)}
    if id_map and any(orig != dense for orig, dense in id_map.items()):
        log.info("remapped %d sparse node ids to a dense range", len(id_map))

    mode, nbuckets = _parse_partitioning(partitioning)
    if mode == "distinct":
        stamps = sorted({r[2] for r in records})
        bucket_of = {ts: i for i, ts in enumerate(stamps)}
        T = len(stamps)
        assign = lambda ts: bucket_of[ts]  # noqa: E731
    else:
        lo = min(r[2] for r in records)
        hi = max(r[2] for r in records)
        span = hi - lo
        T = nbuckets

        def assign(ts):
            if span == 0.0:
                return 0
            return min(int((ts - lo) / span * nbuckets), nbuckets - 1)

    buckets: list[list[tuple[int, int, float]]] = [[] for _ in range(T)]
    for src, dst, ts, w in records:
        buckets[assign(ts)].append((id_map[src], id_map[dst], w))

    snapshots = tuple(make_snapshot(t, recs) for t, recs in enumerate(buckets))
    return TemporalGraph(
        snapshots=snapshots,
        universe_size=len(ids),
        name=name or os.path.basename(str(path)),
        source=str(path),
        id_map=id_map,
    )


def write_edge_list(g: TemporalGraph, path):
    """Write the canonical edge-list format; timestamps are snapshot indices.

    Re-ingesting the file with distinct-timestamp partitioning reproduces the
    snapshots and weights exactly (provided every id in the universe appears).
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {g.name}\n")
        for s in g.snapshots:
            for (u, v), w in sorted(s.edges.items()):
                fh.write(f"{u} {v} {s.t} {w:.17g}\n")


def slice_window(g: TemporalGraph, w: Window) -> TemporalGraph:
    """Return the sub-sequence of snapshots in ``w``, re-indexed from 0."""
    w.validate(g)
    snaps = tuple(
        replace(s, t=i)
        for i, s in enumerate(g.snapshots[w.start : w.start + w.length])
    )
    return TemporalGraph(
        snapshots=snaps,
        universe_size=g.universe_size,
        name=g.name,
        source=g.source,
        id_map=g.id_map,
        global_node_ids=g.global_node_ids,
    )


def chronological_split(g, train_frac, val_frac):
    """Split snapshots into contiguous train/val/test segments.

    Boundaries fall at ``floor(T * train_frac)`` and
    ``floor(T * (train_frac + val_frac))``.
    """
    if not (0.0 < train_frac < 1.0 and 0.0 < val_frac < 1.0):
        raise ValueError("fractions must lie in (0, 1)")
    if train_frac + val_frac >= 1.0:
        raise ValueError("train_frac + val_frac must be < 1")
    T = g.num_snapshots
    b1 = int(T * train_frac)
    b2 = int(T * (train_frac + val_frac))
    if b1 == 0:
        raise ValueError("empty training segment")
    if b2 == b1:
        raise ValueError("empty validation segment")
    if b2 == T:
        raise ValueError("empty test segment")
    return (
        slice_window(g, Window(0, b1)),
        slice_window(g, Window(b1, b2 - b1)),
        slice_window(g, Window(b2, T - b2)),
    )
