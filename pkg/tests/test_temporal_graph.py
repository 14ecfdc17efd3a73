"""Data model and edge-list ingestion tests."""

import math

import pytest

from supralap.temporal_graph import (
    EdgeListError,
    Snapshot,
    TemporalGraph,
    Window,
    chronological_split,
    ingest_edge_list,
    make_snapshot,
    slice_window,
    write_edge_list,
)


def test_snapshot_rejects_self_loops_and_misordered_pairs():
    with pytest.raises(ValueError, match="self-loop"):
        Snapshot(t=0, edges={(2, 2): 1.0})
    with pytest.raises(ValueError, match="min,max"):
        Snapshot(t=0, edges={(3, 1): 1.0})
    with pytest.raises(ValueError, match="negative"):
        Snapshot(t=0, edges={(-1, 2): 1.0})


def test_snapshot_active_nodes_derived():
    s = Snapshot(t=1, edges={(0, 2): 1.0, (2, 5): 2.0})
    assert s.active_nodes == frozenset({0, 2, 5})
    assert s.num_edges == 2
    assert s.degree(2) == 2
    assert s.degree(7) == 0


def test_make_snapshot_merges_duplicates_and_orients_pairs():
    s = make_snapshot(0, [(3, 1), (1, 3, 2.0), (0, 1)])
    # (3,1) default weight 1.0 merged with (1,3) weight 2.0.
    assert s.edges == {(1, 3): 3.0, (0, 1): 1.0}


def test_make_snapshot_self_loop_policy():
    with pytest.raises(ValueError, match="self-loop"):
        make_snapshot(0, [(1, 1)])
    s = make_snapshot(0, [(1, 1), (0, 1)], allow_self_loops=True)
    assert s.edges == {(0, 1): 1.0}  # loop silently dropped


def test_temporal_graph_validates_positions_and_universe():
    with pytest.raises(ValueError, match="has t="):
        TemporalGraph(snapshots=(make_snapshot(1, [(0, 1)]),), universe_size=2)
    with pytest.raises(ValueError, match="universe_size"):
        TemporalGraph(snapshots=(make_snapshot(0, [(0, 5)]),), universe_size=3)


def test_window_validation(toy_graph):
    with pytest.raises(ValueError):
        Window(0, 0)
    with pytest.raises(ValueError):
        Window(-1, 2)
    Window(1, 2).validate(toy_graph)
    with pytest.raises(ValueError, match="out of range"):
        Window(1, 3).validate(toy_graph)


def _write(tmp_path, text, name="g.edges"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_ingest_distinct_timestamps_and_dense_remap(tmp_path):
    p = _write(
        tmp_path,
        "# comment\n"
        "10 30 5.0\n"
        "30 70 5.0 2.5\n"
        "\n"
        "10 70 9.0\n",
    )
    g = ingest_edge_list(p)
    # [DERIVED] ids {10,30,70} -> {0,1,2}; timestamps {5.0,9.0} -> 2 snapshots.
    assert g.universe_size == 3
    assert g.num_snapshots == 2
    assert g.id_map == {10: 0, 30: 1, 70: 2}
    assert g.snapshots[0].edges == {(0, 1): 1.0, (1, 2): 2.5}
    assert g.snapshots[1].edges == {(0, 2): 1.0}


def test_ingest_fixed_bucket_partitioning(tmp_path):
    p = _write(tmp_path, "0 1 0.0\n1 2 0.49\n0 2 0.51\n1 2 1.0\n")
    g = ingest_edge_list(p, partitioning="fixed:2")
    # [DERIVED] span [0,1] split into two equal buckets.
    assert g.num_snapshots == 2
    assert set(g.snapshots[0].edges) == {(0, 1), (1, 2)}
    assert set(g.snapshots[1].edges) == {(0, 2), (1, 2)}


def test_ingest_errors_carry_line_numbers(tmp_path):
    with pytest.raises(EdgeListError, match=":2:"):
        ingest_edge_list(_write(tmp_path, "0 1 0\n0 1\n"))
    with pytest.raises(EdgeListError, match="self-loop"):
        ingest_edge_list(_write(tmp_path, "3 3 0\n"))
    with pytest.raises(EdgeListError, match="negative"):
        ingest_edge_list(_write(tmp_path, "-1 2 0\n"))
    with pytest.raises(EdgeListError, match="empty"):
        ingest_edge_list(_write(tmp_path, "# nothing\n"))
    with pytest.raises(ValueError, match="partitioning"):
        ingest_edge_list(_write(tmp_path, "0 1 0\n"), partitioning="weird")


def test_write_then_ingest_roundtrip(tmp_path, toy_graph):
    p = tmp_path / "out.edges"
    write_edge_list(toy_graph, p)
    back = ingest_edge_list(p)
    assert back.num_snapshots == toy_graph.num_snapshots
    for a, b in zip(back.snapshots, toy_graph.snapshots):
        assert a.edges == b.edges


def test_slice_window_reindexes(toy_graph):
    sub = slice_window(toy_graph, Window(1, 2))
    assert sub.num_snapshots == 2
    assert [s.t for s in sub.snapshots] == [0, 1]
    assert sub.snapshots[0].edges == toy_graph.snapshots[1].edges
    assert sub.universe_size == toy_graph.universe_size


def test_chronological_split_floor_boundaries():
    T = 10
    g = TemporalGraph(
        snapshots=tuple(make_snapshot(t, [(0, 1)]) for t in range(T)),
        universe_size=2,
    )
    tr, va, te = chronological_split(g, 0.7, 0.15)
    # [DERIVED] floor(10*0.7)=7, floor(10*0.85)=8.
    assert (tr.num_snapshots, va.num_snapshots, te.num_snapshots) == (7, 1, 2)
    assert math.isclose(
        tr.num_snapshots + va.num_snapshots + te.num_snapshots, T
    )


def test_chronological_split_degenerate_segments():
    g = TemporalGraph(
        snapshots=tuple(make_snapshot(t, [(0, 1)]) for t in range(3)),
        universe_size=2,
    )
    with pytest.raises(ValueError, match="validation"):
        chronological_split(g, 0.34, 0.1)
    with pytest.raises(ValueError, match="fractions"):
        chronological_split(g, 0.0, 0.5)
    with pytest.raises(ValueError, match="< 1"):
        chronological_split(g, 0.7, 0.4)
