"""CLI subcommands, exit codes, and output files."""

import json

import pytest

from supralap.cli import (
    EXIT_DISTINGUISHED,
    EXIT_OK,
    EXIT_RUNTIME,
    EXIT_USAGE,
    dispatch,
)
from supralap.encodings import load_pe
from supralap.supra import import_matrix


@pytest.fixture
def toy_edges(tmp_path):
    p = tmp_path / "toy.edges"
    p.write_text(
        "0 1 0\n1 2 0\n2 3 0\n"
        "0 1 1\n2 3 1\n"
        "1 2 2\n0 3 2\n"
    )
    return p


def test_ingest_reports_and_writes(tmp_path, toy_edges, capsys):
    out = tmp_path / "canonical.edges"
    code = dispatch(["ingest", "--in", str(toy_edges), "--out", str(out)])
    assert code == EXIT_OK
    assert "3 snapshots, 4 nodes, 7 edges" in capsys.readouterr().out
    assert out.exists()


def test_build_supra_roundtrip(tmp_path, toy_edges):
    out = tmp_path / "m.supra"
    code = dispatch(
        ["build-supra", "--in", str(toy_edges), "--mu", "2.0",
         "--out", str(out)]
    )
    assert code == EXIT_OK
    m = import_matrix(out)
    assert m.kind == "laplacian" and m.mu == 2.0
    # Global nodes on: 4 active nodes + 1 global per layer, 3 layers.
    assert m.rows == 15

    out2 = tmp_path / "m2.supra"
    code = dispatch(
        ["build-supra", "--in", str(toy_edges), "--no-global",
         "--kind", "adjacency", "--out", str(out2)]
    )
    assert code == EXIT_OK
    assert import_matrix(out2).kind == "adjacency"
    assert import_matrix(out2).rows == 12


def test_build_supra_window_flag(tmp_path, toy_edges):
    out = tmp_path / "w.supra"
    code = dispatch(
        ["build-supra", "--in", str(toy_edges), "--window", "0,2",
         "--no-global", "--out", str(out)]
    )
    assert code == EXIT_OK
    assert import_matrix(out).rows == 8


@pytest.mark.parametrize(
    "variant", ["slpe-e", "slpe-i", "slpe-t", "lpe-e", "lpe-i", "lpe-t"]
)
def test_compute_pe_variants(tmp_path, toy_edges, variant):
    out = tmp_path / f"{variant}.pe"
    code = dispatch(
        ["compute-pe", "--in", str(toy_edges), "--variant", variant,
         "--k", "2", "--maxiter", "5", "--out", str(out)]
    )
    assert code == EXIT_OK
    pe = load_pe(out)
    assert pe.variant == variant.upper()
    assert len(pe.entries) > 0


def test_compute_pe_window_and_seed_flags(tmp_path, toy_edges):
    a, b = tmp_path / "a.pe", tmp_path / "b.pe"
    args = ["compute-pe", "--in", str(toy_edges), "--variant", "slpe-e",
            "--k", "3", "--window", "0,3"]
    assert dispatch(args + ["--seed", "1", "--out", str(a)]) == EXIT_OK
    assert dispatch(args + ["--seed", "1", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_wl_test_exit_codes_and_transcript(tmp_path):
    g1 = tmp_path / "g1.edges"
    g2 = tmp_path / "g2.edges"
    g1.write_text("0 1 0\n0 1 1\n")
    g2.write_text("0 1 0\n2 3 1\n")
    out = tmp_path / "wl.json"
    code = dispatch(
        ["wl-test", "--g1", str(g1), "--g2", str(g2), "--mode", "supra",
         "--out", str(out)]
    )
    assert code == EXIT_DISTINGUISHED
    payload = json.loads(out.read_text())
    assert payload["verdict"] == "distinguished"
    assert payload["rounds"][0]["round"] == 1

    code = dispatch(
        ["wl-test", "--g1", str(g1), "--g2", str(g2), "--mode", "layer"]
    )
    assert code == EXIT_OK


def test_smoothness_writes_csv(tmp_path, capsys):
    out = tmp_path / "sm.csv"
    code = dispatch(
        ["smoothness", "--path-length", "8", "--layers", "3",
         "--out", str(out)]
    )
    assert code == EXIT_OK
    assert out.read_text().startswith("t,component,")
    assert "coupled inter-layer sum" in capsys.readouterr().out


def test_bench_writes_csv(tmp_path):
    out = tmp_path / "bench.csv"
    code = dispatch(
        ["bench", "--sizes", "30,60", "--T", "2", "--k", "3",
         "--repeats", "1", "--out", str(out)]
    )
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("size,solver,")
    assert len(lines) == 1 + 4


def test_usage_errors(capsys):
    assert dispatch([]) == EXIT_USAGE
    assert dispatch(["frobnicate"]) == EXIT_USAGE
    assert dispatch(["compute-pe", "--in", "x"]) == EXIT_USAGE  # no variant
    assert dispatch(["ingest"]) == EXIT_USAGE
    capsys.readouterr()  # swallow argparse noise


def test_runtime_errors(tmp_path, capsys):
    assert dispatch(["ingest", "--in", str(tmp_path / "nope")]) == EXIT_RUNTIME
    bad = tmp_path / "bad.edges"
    bad.write_text("0 0 0\n")  # self-loop
    assert dispatch(["ingest", "--in", str(bad)]) == EXIT_RUNTIME
    assert "error:" in capsys.readouterr().err


def test_help_exits_zero(capsys):
    assert dispatch(["--help"]) == EXIT_OK
    capsys.readouterr()
