"""Joint low-rank recovery and graph refinement for grossly corrupted,
graph-smooth data matrices."""

from .alternating import (
    AlternatingConfig,
    DecompositionResult,
    GraphStepConfig,
    alternate,
    full_objective,
    solve_graph_step,
)
from .errors import LographError, NumericalError, ValidationError
from .graphs import (
    knn_similarity_graph,
    laplacian_from_adjacency,
    project_to_laplacian_set,
    smoothness,
    validate_adjacency,
    validate_laplacian,
)
from .lowrank import LowRankStepConfig, StepResult, pca_lowrank, rpca, solve_lowrank_step
from .prox import soft_threshold, svt
from .synth import (
    SynthInstance,
    SynthSpec,
    gen_er_graph,
    gen_lowrank,
    gen_sparse_corruption,
    make_instance,
    recon_error,
)

__version__ = "0.1.0"

__all__ = [
    "AlternatingConfig",
    "DecompositionResult",
    "GraphStepConfig",
    "LographError",
    "LowRankStepConfig",
    "NumericalError",
    "StepResult",
    "SynthInstance",
    "SynthSpec",
    "ValidationError",
    "alternate",
    "full_objective",
    "gen_er_graph",
    "gen_lowrank",
    "gen_sparse_corruption",
    "knn_similarity_graph",
    "laplacian_from_adjacency",
    "make_instance",
    "pca_lowrank",
    "project_to_laplacian_set",
    "recon_error",
    "rpca",
    "smoothness",
    "soft_threshold",
    "solve_graph_step",
    "solve_lowrank_step",
    "svt",
    "validate_adjacency",
    "validate_laplacian",
]
