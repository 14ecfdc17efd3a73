"""Shared fixtures: seeded random temporal graphs and small helpers."""

from __future__ import annotations

import numpy as np
import pytest

from supralap.temporal_graph import TemporalGraph, make_snapshot


def random_temporal_graph(rng, n=None, T=None, min_edges_per_layer=1):
    """Seeded random snapshot sequence with at least one edge per layer."""
    if n is None:
        n = int(rng.integers(5, 201))
    if T is None:
        T = int(rng.integers(1, 6))
    snaps = []
    for t in range(T):
        target = max(min_edges_per_layer, int(rng.integers(n, 3 * n)))
        edges = {}
        for _ in range(3 * target):
            u, v = int(rng.integers(n)), int(rng.integers(n))
            if u == v:
                continue
            edges[(min(u, v), max(u, v))] = 1.0
            if len(edges) >= target:
                break
        if not edges and min_edges_per_layer > 0 and n > 1:
            edges[(0, 1)] = 1.0
        snaps.append(
            make_snapshot(t, [(u, v, w) for (u, v), w in edges.items()])
        )
    return TemporalGraph(
        snapshots=tuple(snaps), universe_size=n, name=f"rand-n{n}-T{T}"
    )


def path_graph_layers(n, T):
    """T identical path-graph snapshots on n nodes."""
    edges = [(i, i + 1) for i in range(n - 1)]
    return TemporalGraph(
        snapshots=tuple(make_snapshot(t, edges) for t in range(T)),
        universe_size=n,
        name=f"path-n{n}-T{T}",
    )


@pytest.fixture
def toy_graph():
    """Four nodes, three snapshots, varying activity."""
    return TemporalGraph(
        snapshots=(
            make_snapshot(0, [(0, 1), (1, 2), (2, 3)]),
            make_snapshot(1, [(0, 1), (2, 3)]),
            make_snapshot(2, [(1, 2), (0, 3)]),
        ),
        universe_size=4,
        name="toy",
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
