"""Weighted angular synchronization with a-priori error bounds."""
from ._backend import has_compiled, use_backend
from .bounds import BoundReport, check_proof_inequalities, eval_bounds, phase_distance
from .graph import (
    DegenerateGraphError,
    DisconnectedGraphError,
    GraphError,
    LaplacianBundle,
    WeightedGraph,
    banded_graph,
    data_laplacian,
    laplacians,
)
from .linalg import (
    ConvergenceError,
    DimensionError,
    EigenPair,
    entrywise_sgn,
    hadamard,
    leading_eigenpair,
    second_smallest_eigenvalue,
    smallest_eigenpair,
    spectral_norm,
)
from .solvers import (
    SdpResult,
    SolverResult,
    solve_er,
    solve_er_normalized,
    solve_lsp,
    solve_sdp,
    tightness_certificate,
)
from .synth import (
    GroundTruth,
    MeasurementSet,
    WeightScheme,
    apply_angular_noise,
    build_weights,
    random_signal,
)

__version__ = "0.1.0"
