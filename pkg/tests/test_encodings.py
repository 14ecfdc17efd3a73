"""Positional-encoding tables: scatter, variants, files, estimators."""

import numpy as np
import pytest
from sklearn.base import clone

from supralap.eigensolve import SolverConfig, lanczos
from supralap.encodings import (
    LayerLaplacianPE,
    PETable,
    SupraLaplacianPE,
    compute_lpe,
    compute_slpe,
    concat_features,
    load_pe,
    save_pe,
)
from supralap.supra import (
    add_global_nodes,
    build_supra_adjacency,
    laplacian_from_adjacency,
)
from supralap.temporal_graph import TemporalGraph, Window, make_snapshot

from conftest import path_graph_layers


def exact_cfg(k, seed=0):
    return SolverConfig(k=k, tol=1e-10, maxiter=100000, seed=seed)


def test_constant_kernel_vector_on_two_layer_pair():
    # [DERIVED] one edge on two nodes in both layers, no global nodes: the
    # supra graph is connected, so the kernel eigenvector is the constant
    # vector over 4 rows, i.e. +-1/2 per entry.
    g = TemporalGraph(
        snapshots=(make_snapshot(0, [(0, 1)]), make_snapshot(1, [(0, 1)])),
        universe_size=2,
    )
    pe = compute_slpe(
        g, Window(0, 2), exact_cfg(1), variant="E", global_nodes=False
    )
    keys, rows = pe.matrix()
    assert keys == [(0, 0), (0, 1), (1, 0), (1, 1)]
    np.testing.assert_allclose(np.abs(rows[:, 0]), 0.5, atol=1e-10)
    assert len(set(np.sign(rows[:, 0]))) == 1  # one consistent sign


def test_slpe_scatter_matches_manual_pipeline(toy_graph):
    # The table rows must equal the solver's eigenvector rows routed through
    # the index map, bit for bit.
    w = Window(0, 3)
    cfg = exact_cfg(3)
    pe = compute_slpe(toy_graph, w, cfg, variant="E")

    gw = add_global_nodes(toy_graph)
    lap = laplacian_from_adjacency(build_supra_adjacency(gw, mu=1.0))
    result = lanczos(lap, cfg)
    gids = set(gw.global_node_ids)
    for r, (t, node) in enumerate(lap.index_map.entries):
        if node in gids:
            assert (t, node) not in pe.entries
        else:
            assert np.array_equal(pe.entries[(t, node)], result.vectors[r])


def test_slpe_keep_global_rows(toy_graph):
    w = Window(0, 3)
    pe = compute_slpe(toy_graph, w, exact_cfg(2), keep_global=True)
    assert (0, 4) in pe.entries and (2, 6) in pe.entries


def test_slpe_rejects_edgeless_window():
    g = TemporalGraph(
        snapshots=(make_snapshot(0, []),), universe_size=2
    )
    with pytest.raises(ValueError, match="edgeless"):
        compute_slpe(g, Window(0, 1), exact_cfg(1))


def test_slpe_include_eigenvalues_width(toy_graph):
    pe = compute_slpe(
        toy_graph, Window(0, 3), exact_cfg(2), include_eigenvalues=True
    )
    assert pe.c == 4
    _, rows = pe.matrix()
    # Trailing eigenvalue channels are constant across rows.
    assert np.ptp(rows[:, 2]) == 0.0 and np.ptp(rows[:, 3]) == 0.0


def test_slpe_drop_trivial_removes_kernel_column(toy_graph):
    pe = compute_slpe(
        toy_graph, Window(0, 3), exact_cfg(3), drop_trivial=True
    )
    assert pe.c == 2  # connected supra graph: exactly one trivial eigenvalue


def test_slpe_inexact_variant_flags_nonconvergence(toy_graph):
    cfg = SolverConfig(k=3, tol=1e-14, maxiter=1)
    pe = compute_slpe(toy_graph, Window(0, 3), cfg, variant="I")
    assert not pe.converged
    assert any("did not converge" in n for n in pe.notes)


def test_slpe_trajectory_width_is_k_times_iterations(toy_graph):
    cfg = SolverConfig(k=2, tol=1e-14, maxiter=6, seed=1)
    pe = compute_slpe(toy_graph, Window(0, 3), cfg, variant="T")
    assert pe.c % 2 == 0 and pe.c == 6 * 2


def test_lpe_matches_slpe_on_single_layer_up_to_sign():
    g = path_graph_layers(8, 1)
    w = Window(0, 1)
    slpe = compute_slpe(g, w, exact_cfg(3), global_nodes=False)
    lpe = compute_lpe(g, w, exact_cfg(3), global_nodes=False)
    # A single layer has no coupling, so the subspaces agree; eigenvalues of
    # the path are simple, so columns agree up to sign.
    _, a = slpe.matrix()
    _, b = lpe.matrix()
    for j in range(3):
        assert np.allclose(a[:, j], b[:, j], atol=1e-8) or np.allclose(
            a[:, j], -b[:, j], atol=1e-8
        )


def test_lpe_zero_pads_small_layers():
    g = TemporalGraph(
        snapshots=(
            make_snapshot(0, [(0, 1)]),
            make_snapshot(1, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]),
        ),
        universe_size=4,
    )
    pe = compute_lpe(g, Window(0, 2), exact_cfg(4), global_nodes=False)
    assert pe.padded
    assert any("zero-padded" in n for n in pe.notes)
    # Layer 0 has rank 2 only: columns beyond k_eff are zero.
    row = pe.entries[(0, 0)]
    assert row.shape == (4,)
    np.testing.assert_array_equal(row[2:], 0.0)
    # Layer 1 rows are full width and not padded away.
    assert pe.entries[(1, 0)].shape == (4,)
    assert np.any(pe.entries[(1, 0)] != 0.0)


def test_lpe_layer_seeds_differ(toy_graph):
    # Different layers use different solver seeds; identical layer graphs
    # still produce identical magnitudes, so compare via a repeated run
    # instead: the whole table must be deterministic.
    pe1 = compute_lpe(toy_graph, Window(0, 3), exact_cfg(2))
    pe2 = compute_lpe(toy_graph, Window(0, 3), exact_cfg(2))
    for key in pe1.entries:
        assert np.array_equal(pe1.entries[key], pe2.entries[key])


def test_lpe_trajectory_pads_to_common_length():
    g = TemporalGraph(
        snapshots=(
            make_snapshot(0, [(0, 1), (1, 2), (0, 3), (2, 3)]),
            make_snapshot(1, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]),
        ),
        universe_size=6,
    )
    cfg = SolverConfig(k=2, tol=1e-14, maxiter=4, seed=0)
    pe = compute_lpe(g, Window(0, 2), cfg, variant="T", global_nodes=False)
    widths = {v.shape[0] for v in pe.entries.values()}
    assert widths == {pe.c}


def test_pe_table_width_validation():
    with pytest.raises(ValueError, match="width"):
        PETable(
            entries={(0, 0): np.zeros(3)},
            c=2,
            variant="SLPE-E",
            k=2,
            include_eigenvalues=False,
            window=Window(0, 1),
            solver_meta=SolverConfig(k=2),
        )


def test_save_load_roundtrip(tmp_path, toy_graph):
    pe = compute_slpe(toy_graph, Window(0, 3), exact_cfg(3))
    p = tmp_path / "pe.txt"
    save_pe(pe, p)
    back = load_pe(p)
    assert back.variant == pe.variant and back.c == pe.c and back.k == pe.k
    assert back.window == pe.window
    assert sorted(back.entries) == sorted(pe.entries)
    for key in pe.entries:
        assert np.array_equal(back.entries[key], pe.entries[key])
    # Saving the reloaded table is byte-identical.
    p2 = tmp_path / "pe2.txt"
    save_pe(back, p2)
    assert p.read_bytes() == p2.read_bytes()


def test_load_pe_rejects_missing_header(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("0 0 1.0\n")
    with pytest.raises(ValueError, match="header"):
        load_pe(p)


def test_concat_features(toy_graph):
    pe = compute_slpe(toy_graph, Window(0, 3), exact_cfg(2))
    feats = {v: np.array([float(v), 1.0]) for v in range(4)}
    out = concat_features(feats, pe, t=0)
    assert set(out) == {0, 1, 2, 3}
    assert out[2].shape == (2 + pe.c,)
    np.testing.assert_array_equal(out[2][:2], [2.0, 1.0])

    with pytest.raises(ValueError, match="missing feature"):
        concat_features({0: np.zeros(2)}, pe, t=0)
    # Node 5 has no PE entry: dropped by default, zero-padded on request.
    feats[5] = np.array([5.0, 1.0])
    assert 5 not in concat_features(feats, pe, t=0)
    padded = concat_features(feats, pe, t=0, pad_missing=True)
    np.testing.assert_array_equal(padded[5][2:], 0.0)


def test_estimator_params_and_clone(toy_graph):
    est = SupraLaplacianPE(k=2, window_size=2, variant="I", maxiter=5)
    params = est.get_params()
    assert params["k"] == 2 and params["variant"] == "I"
    cl = clone(est)
    assert cl.get_params() == params
    est.set_params(k=3)
    assert est.get_params()["k"] == 3


@pytest.mark.parametrize("cls", [SupraLaplacianPE, LayerLaplacianPE])
def test_estimator_fit_transform(cls, toy_graph):
    est = cls(k=2, window_size=2, tol=1e-10, maxiter=100000)
    pe = est.fit(toy_graph).transform(toy_graph)
    assert isinstance(pe, PETable)
    assert est.n_snapshots_ == 3 and est.universe_size_ == 4
    # The window covers the last two snapshots.
    assert pe.window == Window(1, 2)
    assert all(t in (0, 1) for t, _ in pe.entries)


def test_estimator_validation(toy_graph):
    with pytest.raises(TypeError, match="TemporalGraph"):
        SupraLaplacianPE().fit(np.zeros((3, 3)))
    with pytest.raises(ValueError, match="window_size"):
        SupraLaplacianPE(window_size=5).fit(toy_graph)
    with pytest.raises(ValueError, match="variant"):
        SupraLaplacianPE(window_size=2, variant="Z").fit(toy_graph)
