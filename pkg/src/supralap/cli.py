"""Command-line pipeline: ingest, build-supra, compute-pe, wl-test,
smoothness, bench.

Exit codes: 0 success, 1 "distinguished" (wl-test), 2 usage errors,
3 runtime failures.  All randomness flows from --seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from supralap.bench import BenchSpec, run_bench
from supralap.eigensolve import SolverConfig
from supralap.encodings import compute_lpe, compute_slpe, save_pe
from supralap.smoothness import inter_layer_consistency_demo
from supralap.supra import (
    add_global_nodes,
    build_supra_adjacency,
    export_matrix,
    laplacian_from_adjacency,
)
from supralap.temporal_graph import (
    Window,
    ingest_edge_list,
    slice_window,
    write_edge_list,
)
from supralap.wl import WlConfig, distinguish

log = logging.getLogger("supralap")

EXIT_OK = 0
EXIT_DISTINGUISHED = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def _parse_window(text):
    try:
        start, length = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            "window must be 'start,length'"
        ) from exc
    return Window(start, length)


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--log", choices=("quiet", "info", "debug"), default="quiet"
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="supralap",
        description=(
            "Laplacian positional encodings for snapshot-based dynamic "
            "graphs via the supra-Laplacian"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="read an edge list, report statistics")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--partition", default="distinct", help="distinct|fixed:N")
    p.add_argument("--out", help="write canonical edge list here")
    _add_common(p)

    p = sub.add_parser("build-supra", help="export a supra matrix")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--partition", default="distinct")
    p.add_argument("--window", type=_parse_window)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--kind", choices=("adjacency", "laplacian"),
                   default="laplacian")
    p.add_argument("--full", action="store_true",
                   help="full indexing instead of reduced")
    p.add_argument("--no-global", action="store_true",
                   help="skip global-node augmentation")
    p.add_argument("--use-weights", action="store_true")
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("compute-pe", help="write a positional-encoding table")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--partition", default="distinct")
    p.add_argument(
        "--variant",
        required=True,
        choices=[
            f"{fam}-{v}" for fam in ("slpe", "lpe") for v in ("e", "i", "t")
        ],
    )
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--window", type=_parse_window, default=None,
                   help="start,length (default: last 3 snapshots)")
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--maxiter", type=int, default=None,
                   help="default 20 (inexact) or 10000 (exact)")
    p.add_argument("--include-eigenvalues", action="store_true")
    p.add_argument("--drop-trivial", action="store_true")
    p.add_argument("--keep-global", action="store_true")
    p.add_argument("--no-global", action="store_true")
    p.add_argument("--full", action="store_true")
    p.add_argument("--use-weights", action="store_true")
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("wl-test", help="compare two graphs by color refinement")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--mode", choices=("supra", "layer"), default="supra")
    p.add_argument("--partition", default="distinct")
    p.add_argument("--max-rounds", type=int, default=100)
    p.add_argument("--out", help="write the round transcript JSON here")
    _add_common(p)

    p = sub.add_parser("smoothness", help="inter-layer consistency demo CSV")
    p.add_argument("--path-length", type=int, default=10)
    p.add_argument("--layers", type=int, default=4)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("bench", help="solver timing sweep")
    p.add_argument("--sizes", required=True,
                   help="comma-separated node counts, ascending")
    p.add_argument("--solvers", default="lanczos,lobpcg")
    p.add_argument("--target", choices=("supra", "single-layer"),
                   default="supra")
    p.add_argument("--T", type=int, default=3)
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--maxiter", type=int, default=20,
                   help="LOBPCG iteration cap")
    p.add_argument("--out", required=True)
    _add_common(p)

    return parser


def _setup_logging(level):
    levels = {"quiet": logging.WARNING, "info": logging.INFO,
              "debug": logging.DEBUG}
    logging.basicConfig(
        level=levels[level], format="%(levelname)s %(name)s: %(message)s"
    )


def _load(args):
    return ingest_edge_list(args.infile, partitioning=args.partition)


def _cmd_ingest(args):
    g = _load(args)
    print(
        f"{g.name}: {g.num_snapshots} snapshots, {g.universe_size} nodes, "
        f"{g.num_edges} edges"
    )
    if args.out:
        write_edge_list(g, args.out)
    return EXIT_OK


def _cmd_build_supra(args):
    g = _load(args)
    if args.window is not None:
        g = slice_window(g, args.window)
    if not args.no_global:
        g = add_global_nodes(g)
    m = build_supra_adjacency(
        g, mu=args.mu, reduced=not args.full, use_weights=args.use_weights
    )
    if args.kind == "laplacian":
        m = laplacian_from_adjacency(m)
    export_matrix(m, args.out)
    print(f"wrote {m.kind} matrix: {m.rows} rows, {m.nnz} nonzeros")
    return EXIT_OK


def _cmd_compute_pe(args):
    g = _load(args)
    family, variant = args.variant.split("-")
    variant = variant.upper()
    window = args.window
    if window is None:
        length = min(3, g.num_snapshots)
        window = Window(g.num_snapshots - length, length)
    maxiter = args.maxiter
    if maxiter is None:
        maxiter = 10000 if variant == "E" else 20
    cfg = SolverConfig(
        k=args.k, tol=args.tol, maxiter=maxiter, seed=args.seed
    )
    common = dict(
        global_nodes=not args.no_global,
        reduced=not args.full,
        include_eigenvalues=args.include_eigenvalues,
        keep_global=args.keep_global,
        use_weights=args.use_weights,
    )
    if family == "slpe":
        pe = compute_slpe(
            g, window, cfg, variant=variant, mu=args.mu,
            drop_trivial=args.drop_trivial, **common,
        )
    else:
        pe = compute_lpe(g, window, cfg, variant=variant, **common)
    save_pe(pe, args.out)
    print(f"wrote {pe.variant} table: {len(pe)} entries, width {pe.c}")
    if not pe.converged:
        print("warning: solver did not fully converge", file=sys.stderr)
    return EXIT_OK


def _cmd_wl_test(args):
    g1 = ingest_edge_list(args.g1, partitioning=args.partition)
    g2 = ingest_edge_list(args.g2, partitioning=args.partition)
    cfg = WlConfig(mode=args.mode, max_rounds=args.max_rounds)
    verdict, transcript = distinguish(g1, g2, cfg)
    payload = json.dumps(
        {"verdict": verdict, "mode": args.mode, "rounds": transcript},
        indent=2,
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    return EXIT_DISTINGUISHED if verdict == "distinguished" else EXIT_OK


def _cmd_smoothness(args):
    report = inter_layer_consistency_demo(
        args.path_length,
        args.layers,
        args.mu,
        k=args.k,
        seed=args.seed,
        csv_path=args.out,
    )
    print(
        f"coupled inter-layer sum: {report['coupled_inter_sum']:.6g}  "
        f"uncoupled: {report['uncoupled_inter_sum']:.6g}"
    )
    return EXIT_OK


def _cmd_bench(args):
    sizes = tuple(int(s) for s in args.sizes.split(","))
    solvers = tuple(args.solvers.split(","))
    spec = BenchSpec(
        sizes=sizes,
        ba_m=args.m,
        T=args.T,
        k=args.k,
        repeats=args.repeats,
        solvers=solvers,
        solver_cfgs={
            "lobpcg": SolverConfig(k=args.k, tol=1e-8, maxiter=args.maxiter)
        },
        seed=args.seed,
    )
    report = run_bench(spec, target=args.target)
    report.write_csv(args.out)
    for row in report.rows:
        if row.error:
            print(f"size {row.size} {row.solver}: refused ({row.error})")
        else:
            print(
                f"size {row.size} {row.solver}: median {row.median_ms:.2f} ms"
                f" (converged={row.converged})"
            )
    for size, ratio in report.speedups.items():
        print(f"size {size}: lobpcg speedup over lanczos {ratio:.1f}x")
    return EXIT_OK


COMMANDS = {
    "ingest": _cmd_ingest,
    "build-supra": _cmd_build_supra,
    "compute-pe": _cmd_compute_pe,
    "wl-test": _cmd_wl_test,
    "smoothness": _cmd_smoothness,
    "bench": _cmd_bench,
}


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code != 0 else EXIT_OK
    _setup_logging(args.log)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
