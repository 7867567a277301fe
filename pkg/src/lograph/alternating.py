"""Graph refinement step and the outer alternating loop.

The graph step refines a valid Laplacian from the current low-rank
estimate by ADMM on

    minimize  gamma tr(L' Phi L) + beta ||Phi||_F^2
    subject to  Phi in the valid-Laplacian set,

splitting the set constraint onto a consensus variable ``z`` that is
passed through the clamp realization of the set projection after every
sweep.  Because that projection rebuilds the diagonal from the clamped
off-diagonals (it is exact on the off-diagonal block, not on the full
matrix), neither mode collapses to the formal minimizer of the objective;
each settles at a scaled projection of the negated row Gram matrix:

* ``standard`` — dual step ``u += rho (z - Phi)`` with the stationarity
  denominator ``2 beta + rho``; settles near
  ``project(-(gamma / (2 beta)) L L')``.
* ``paper_literal`` (CLI flag value ``paper-literal``) — diminishing dual
  step ``(1/k)`` with denominator ``beta/2 + rho``; settles near
  ``project(-(2 gamma / beta) L L')``, four times the standard scale at
  ``gamma == beta``.  This is the variant that reproduces the published
  synthetic benchmark, and the benchmark runner uses it by default.

When the smoothness term vanishes identically (``gamma == 0`` or all
signal rows equal), the unique minimizer is the zero graph and it is
returned directly.

The outer loop alternates the low-rank step with the graph step and
monitors the full objective

    ||L||_* + delta ||M||_1 + gamma tr(L' Phi L) + beta ||Phi||_F^2 ,

stopping (and keeping the previous iterate) if an alternation would
increase it, so the logged objective sequence is non-increasing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .graphs import project_to_laplacian_set, smoothness, validate_laplacian
from .lowrank import LowRankStepConfig, StepResult, _as_data_matrix, solve_lowrank_step

__all__ = [
    "GraphStepConfig",
    "AlternatingConfig",
    "DecompositionResult",
    "solve_graph_step",
    "alternate",
    "full_objective",
    "DUAL_STEP_MODES",
]

logger = logging.getLogger(__name__)

DUAL_STEP_MODES = ("standard", "paper_literal")

# Tolerated objective increase per outer iteration before the loop
# stops and reverts; keeps the logged sequence non-increasing.
_OBJECTIVE_SLACK = 1e-9


@dataclass
class GraphStepConfig:
    """Weights and ADMM controls for the graph refinement step.

    Only the ratio ``beta / gamma`` steers the minimizer's direction; both
    are stored explicitly.  ``dual_step_mode`` selects between the
    ``standard`` and ``paper_literal`` (diminishing 1/k) dual updates
    described in the module docstring.
    """

    gamma: float
    beta: float
    rho: float = 1.0
    max_iters: int = 1000
    tol: float = 1e-7
    dual_step_mode: str = "standard"

    def __post_init__(self):
        if self.gamma < 0:
            raise ValidationError(f"gamma must be nonnegative, got {self.gamma}")
        if self.beta <= 0:
            raise ValidationError(f"beta must be positive, got {self.beta}")
        if self.rho <= 0:
            raise ValidationError(f"rho must be positive, got {self.rho}")
        if self.max_iters < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.tol <= 0:
            raise ValidationError(f"tol must be positive, got {self.tol}")
        if self.dual_step_mode not in DUAL_STEP_MODES:
            raise ValidationError(
                f"dual_step_mode must be one of {DUAL_STEP_MODES}, got {self.dual_step_mode!r}"
            )


@dataclass
class AlternatingConfig:
    """Outer-loop controls wrapping the two step configurations."""

    lowrank_cfg: LowRankStepConfig
    graph_cfg: GraphStepConfig
    outer_iters: int = 10
    outer_tol: float = 1e-4

    def __post_init__(self):
        if self.outer_iters < 1:
            raise ValidationError(f"outer_iters must be >= 1, got {self.outer_iters}")
        if self.outer_tol <= 0:
            raise ValidationError(f"outer_tol must be positive, got {self.outer_tol}")


@dataclass
class DecompositionResult:
    """Joint output of the alternating solver.

    ``history`` holds one row per accepted outer iteration:
    ``(outer_iter, objective, lowrank_rel_change, graph_rel_change)``
    where the objective is the full four-term value above.
    """

    low_rank: np.ndarray
    sparse: np.ndarray
    laplacian: np.ndarray
    outer_iterations: int
    converged: bool
    lowrank_result: StepResult
    history: np.ndarray = field(repr=False, default_factory=lambda: np.empty((0, 4)))


def solve_graph_step(signal, cfg: GraphStepConfig) -> np.ndarray:
    """Refine a valid Laplacian from the row structure of ``signal``.

    Deterministic given its inputs: the iteration starts from zero
    matrices, so the output depends only on ``signal`` and ``cfg``.
    Always returns an exact member of the valid-Laplacian set.
    """
    sig = _as_data_matrix(signal, "signal")
    p = sig.shape[0]
    # Smoothness term identically zero: the zero graph is the unique
    # minimizer of the remaining Frobenius term.
    if cfg.gamma == 0.0 or bool((sig == sig[0]).all()):
        return np.zeros((p, p))
    gram = cfg.gamma * (sig @ sig.T)
    rho = cfg.rho
    literal = cfg.dual_step_mode == "paper_literal"
    denom = (cfg.beta / 2.0 + rho) if literal else (2.0 * cfg.beta + rho)

    z = np.zeros((p, p))
    dual = np.zeros((p, p))
    stop = cfg.tol * p
    for k in range(1, cfg.max_iters + 1):
        phi = (rho * z + dual - gram) / denom
        z_new = project_to_laplacian_set(phi - dual / rho)
        gap = z_new - phi
        if literal:
            dual += gap / k
        else:
            dual += rho * gap
        dz = float(np.linalg.norm(z_new - z))
        z = z_new
        if float(np.linalg.norm(gap)) <= stop and dz <= stop:
            break
    return z


def full_objective(
    low_rank, sparse, laplacian, delta: float, gamma: float, beta: float
) -> float:
    """Four-term objective: nuclear + weighted L1 + smoothness + Frobenius."""
    nuclear = float(np.linalg.svd(np.asarray(low_rank, float), compute_uv=False).sum())
    l1 = float(np.abs(sparse).sum())
    frob2 = float(np.linalg.norm(laplacian) ** 2)
    return nuclear + delta * l1 + gamma * smoothness(low_rank, laplacian) + beta * frob2


def alternate(data, initial_laplacian, cfg: AlternatingConfig) -> DecompositionResult:
    """Alternate the low-rank step and the graph step from an initial graph.

    Stops after ``cfg.outer_iters`` alternations, earlier when the relative
    change of the low-rank estimate falls below ``cfg.outer_tol``, or when
    a further alternation would increase the full objective (the previous
    iterate is then kept, so the recorded objectives are non-increasing).
    """
    x = _as_data_matrix(data)
    phi = validate_laplacian(initial_laplacian)
    if phi.shape[0] != x.shape[0]:
        raise ValidationError(
            f"initial laplacian is {phi.shape[0]}x{phi.shape[0]} but data has {x.shape[0]} rows"
        )
    delta = cfg.lowrank_cfg.delta
    gamma = cfg.lowrank_cfg.gamma
    beta = cfg.graph_cfg.beta

    rows = []
    best: tuple | None = None  # (low, sparse, phi, step)
    prev_obj = np.inf
    converged = False
    for outer in range(1, cfg.outer_iters + 1):
        step = solve_lowrank_step(x, phi if gamma > 0 else None, cfg.lowrank_cfg)
        phi_new = solve_graph_step(step.low_rank, cfg.graph_cfg)
        objective = full_objective(step.low_rank, step.sparse, phi_new, delta, gamma, beta)

        if objective > prev_obj + _OBJECTIVE_SLACK * max(1.0, abs(prev_obj)):
            logger.info(
                "outer_iter=%d objective %.9g would exceed %.9g; stopping at previous iterate",
                outer, objective, prev_obj,
            )
            converged = True
            break

        if best is None:
            low_change = np.nan
        else:
            prev_low = best[0]
            low_change = float(
                np.linalg.norm(step.low_rank - prev_low) / max(np.linalg.norm(prev_low), 1.0)
            )
        graph_change = float(
            np.linalg.norm(phi_new - phi) / max(np.linalg.norm(phi), 1.0)
        )
        rows.append((outer, objective, low_change, graph_change))
        logger.info(
            "outer_iter=%d eq_objective=%.9g lowrank_rel_change=%s graph_rel_change=%.3e",
            outer, objective, f"{low_change:.3e}", graph_change,
        )

        best = (step.low_rank, step.sparse, phi_new, step)
        prev_obj = objective
        phi = phi_new
        if not np.isnan(low_change) and low_change <= cfg.outer_tol:
            converged = True
            break

    assert best is not None  # outer_iters >= 1 and first iteration always accepted
    low, sparse, phi, step = best
    return DecompositionResult(
        low_rank=low,
        sparse=sparse,
        laplacian=phi,
        outer_iterations=len(rows),
        converged=converged,
        lowrank_result=step,
        history=np.array(rows, dtype=float).reshape(-1, 4),
    )
