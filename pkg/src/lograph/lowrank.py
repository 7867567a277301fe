"""ADMM solver for the low-rank + sparse split with graph smoothing.

Solves, for a fixed valid Laplacian ``Phi``,

    minimize  ||L||_* + delta ||M||_1 + gamma tr(L' Phi L)
    subject to  X = L + M

by splitting the nuclear term onto an auxiliary variable ``J`` (constraint
``L = J``) so every subproblem has a closed form:

    J  <-  svt(L + U1, 1/rho)
    M  <-  soft_threshold(X - L - U2, delta/rho)
    L  <-  (2 gamma Phi + 2 rho I)^{-1} [rho (J - U1) + rho (X - M - U2)]
    U1 +=  L - J
    U2 +=  L + M - X

with scaled duals U1, U2.  The Laplacian is positive semidefinite, so the
L-step system is symmetric positive definite and its Cholesky factor is
computed once and reused.  Plain robust decomposition (no graph term) and a
truncated-SVD baseline are provided alongside.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import NumericalError, ValidationError
from .graphs import validate_laplacian
from .prox import soft_threshold

__all__ = [
    "LowRankStepConfig",
    "StepResult",
    "solve_lowrank_step",
    "rpca",
    "pca_lowrank",
]


@dataclass
class LowRankStepConfig:
    """Weights and ADMM controls for the low-rank step.

    ``delta`` weights the entrywise sparsity penalty, ``gamma`` the graph
    smoothness term, and ``rho`` is the ADMM penalty.  When
    ``adaptive_rho`` is set, ``rho`` is doubled or halved whenever the
    primal and dual residuals diverge by more than a factor of 10.
    """

    delta: float
    gamma: float = 0.0
    rho: float = 1.0
    max_iters: int = 500
    tol_abs: float = 1e-8
    tol_rel: float = 1e-6
    adaptive_rho: bool = False

    def __post_init__(self):
        if self.delta <= 0:
            raise ValidationError(f"delta must be positive, got {self.delta}")
        if self.gamma < 0:
            raise ValidationError(f"gamma must be nonnegative, got {self.gamma}")
        if self.rho <= 0:
            raise ValidationError(f"rho must be positive, got {self.rho}")
        if self.max_iters < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters}")
        for name in ("tol_abs", "tol_rel"):
            val = getattr(self, name)
            if not 0 < val < 1:
                raise ValidationError(f"{name} must lie in (0, 1), got {val}")


@dataclass
class StepResult:
    """Solver output: estimates plus convergence diagnostics.

    ``history`` holds one row per iteration:
    ``(iteration, objective, primal_residual, dual_residual)``.
    """

    low_rank: np.ndarray
    sparse: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    objective: float
    converged: bool
    history: np.ndarray = field(repr=False, default_factory=lambda: np.empty((0, 4)))


def _as_data_matrix(mat, name: str = "data") -> np.ndarray:
    arr = np.asarray(mat, dtype=float)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        i, j = np.argwhere(~np.isfinite(arr))[0]
        raise ValidationError(f"{name}[{i},{j}] = {arr[i, j]!r} is not finite")
    return arr


def solve_lowrank_step(data, laplacian, cfg: LowRankStepConfig) -> StepResult:
    """Run the ADMM iteration above for fixed ``laplacian``.

    ``laplacian`` may be None when ``cfg.gamma == 0``.  Hitting
    ``max_iters`` is reported via ``converged=False``, not raised; only a
    non-finite iterate raises :class:`NumericalError`.

    The returned low-rank estimate is the nuclear-prox iterate ``J``, whose
    spectrum is exactly soft-thresholded; at convergence it coincides with
    the smoothing iterate ``L`` to within the stopping tolerance.
    """
    x = _as_data_matrix(data)
    p, n = x.shape
    if cfg.gamma > 0:
        if laplacian is None:
            raise ValidationError("gamma > 0 requires a laplacian")
        phi = validate_laplacian(laplacian)
        if phi.shape[0] != p:
            raise ValidationError(
                f"laplacian is {phi.shape[0]}x{phi.shape[0]} but data has {p} rows"
            )
    else:
        phi = None

    rho = cfg.rho
    low = x.copy()
    sparse = np.zeros_like(x)
    aux = x.copy()
    dual_aux = np.zeros_like(x)   # scaled dual for L - J = 0
    dual_fit = np.zeros_like(x)   # scaled dual for L + M - X = 0

    def factor(r):
        if phi is None:
            return None
        return cho_factor(2.0 * cfg.gamma * phi + 2.0 * r * np.eye(p))

    chol = factor(rho)
    x_norm = float(np.linalg.norm(x))
    sqrt_pn = np.sqrt(p * n)

    history = np.empty((cfg.max_iters, 4))
    converged = False
    it = 0
    s_norm = 0.0
    nuclear = 0.0
    for it in range(1, cfg.max_iters + 1):
        # J-step: prox of the nuclear norm, inlined so the thresholded
        # singular values double as the objective's nuclear term.
        try:
            u, s, vt = np.linalg.svd(low + dual_aux, full_matrices=False)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"SVD failed at iteration {it}: {exc}") from exc
        s = np.maximum(s - 1.0 / rho, 0.0)
        aux = (u * s) @ vt
        nuclear = float(s.sum())

        sparse = soft_threshold(x - low - dual_fit, cfg.delta / rho)

        rhs = rho * (aux - dual_aux) + rho * (x - sparse - dual_fit)
        low_new = rhs / (2.0 * rho) if phi is None else cho_solve(chol, rhs)
        if not np.all(np.isfinite(low_new)):
            raise NumericalError(f"non-finite iterate at iteration {it}")

        dual_aux += low_new - aux
        dual_fit += low_new + sparse - x

        res_aux = float(np.linalg.norm(low_new - aux))
        res_fit = float(np.linalg.norm(low_new + sparse - x))
        r_norm = np.hypot(res_aux, res_fit)
        s_norm = rho * float(np.linalg.norm(low_new - low))
        low = low_new

        smooth = float(np.sum(aux * (phi @ aux))) if phi is not None else 0.0
        objective = nuclear + cfg.delta * float(np.abs(sparse).sum()) + cfg.gamma * smooth
        history[it - 1] = (it, objective, res_fit, s_norm)

        eps_pri = sqrt_pn * cfg.tol_abs + cfg.tol_rel * max(
            x_norm,
            float(np.linalg.norm(low)),
            float(np.linalg.norm(aux)),
            float(np.linalg.norm(sparse)),
        )
        eps_dual = sqrt_pn * cfg.tol_abs + cfg.tol_rel * rho * max(
            float(np.linalg.norm(dual_aux)), float(np.linalg.norm(dual_fit))
        )
        if r_norm <= eps_pri and s_norm <= eps_dual:
            converged = True
            break

        if cfg.adaptive_rho:
            if r_norm > 10.0 * s_norm:
                rho *= 2.0
                dual_aux /= 2.0
                dual_fit /= 2.0
                chol = factor(rho)
            elif s_norm > 10.0 * r_norm:
                rho /= 2.0
                dual_aux *= 2.0
                dual_fit *= 2.0
                chol = factor(rho)

    smooth = float(np.sum(aux * (phi @ aux))) if phi is not None else 0.0
    objective = nuclear + cfg.delta * float(np.abs(sparse).sum()) + cfg.gamma * smooth
    return StepResult(
        low_rank=aux,
        sparse=sparse,
        iterations=it,
        primal_residual=float(np.linalg.norm(x - aux - sparse)),
        dual_residual=s_norm,
        objective=objective,
        converged=converged,
        history=history[:it],
    )


def rpca(data, delta: float, cfg: LowRankStepConfig | None = None) -> StepResult:
    """Robust decomposition without the graph term (``gamma`` forced to 0)."""
    if cfg is None:
        cfg = LowRankStepConfig(delta=delta)
    cfg = dataclasses.replace(cfg, delta=delta, gamma=0.0)
    return solve_lowrank_step(data, None, cfg)


def pca_lowrank(data, k: int) -> np.ndarray:
    """Best rank-``k`` approximation by truncated SVD."""
    x = _as_data_matrix(data)
    if not 1 <= k <= min(x.shape):
        raise ValidationError(f"k must lie in [1, {min(x.shape)}], got {k}")
    try:
        u, s, vt = np.linalg.svd(x, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc
    return (u[:, :k] * s[:k]) @ vt[:k]
