"""Supra-Laplacian positional encodings for discrete-time dynamic graphs."""

from supralap.temporal_graph import (
    Snapshot,
    TemporalGraph,
    Window,
    chronological_split,
    ingest_edge_list,
    slice_window,
    write_edge_list,
)
from supralap.supra import (
    SupraIndexMap,
    SupraMatrix,
    add_global_nodes,
    build_supra_adjacency,
    laplacian_from_adjacency,
    layer_laplacians,
)
from supralap.eigensolve import (
    EigenResult,
    SolverConfig,
    build_trajectory,
    dense_reference,
    lanczos,
    lobpcg,
)
from supralap.encodings import (
    LayerLaplacianPE,
    PETable,
    SupraLaplacianPE,
    compute_lpe,
    compute_slpe,
    concat_features,
)

__version__ = "0.1.0"

__all__ = [
    "Snapshot",
    "TemporalGraph",
    "Window",
    "ingest_edge_list",
    "write_edge_list",
    "slice_window",
    "chronological_split",
    "SupraIndexMap",
    "SupraMatrix",
    "add_global_nodes",
    "build_supra_adjacency",
    "laplacian_from_adjacency",
    "layer_laplacians",
    "EigenResult",
    "SolverConfig",
    "dense_reference",
    "lanczos",
    "lobpcg",
    "build_trajectory",
    "PETable",
    "compute_slpe",
    "compute_lpe",
    "concat_features",
    "SupraLaplacianPE",
    "LayerLaplacianPE",
]
