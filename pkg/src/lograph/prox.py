"""Proximal operators: entrywise soft threshold and singular-value threshold."""

from __future__ import annotations

import numpy as np

from .errors import NumericalError, ValidationError

__all__ = ["soft_threshold", "svt"]


def soft_threshold(mat, tau: float) -> np.ndarray:
    """Entrywise shrinkage sign(a) * max(|a| - tau, 0).

    Proximal operator of ``tau * ||.||_1``.
    """
    if tau < 0:
        raise ValidationError(f"threshold must be nonnegative, got {tau}")
    arr = np.asarray(mat, dtype=float)
    return np.sign(arr) * np.maximum(np.abs(arr) - tau, 0.0)


def svt(mat, tau: float) -> np.ndarray:
    """Singular-value thresholding, the proximal operator of ``tau * ||.||_*``.

    Soft-thresholds the singular values of ``mat``; the output's singular
    values are ``max(sigma_i - tau, 0)``.
    """
    if tau < 0:
        raise ValidationError(f"threshold must be nonnegative, got {tau}")
    arr = np.asarray(mat, dtype=float)
    try:
        u, s, vt = np.linalg.svd(arr, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc
    s = np.maximum(s - tau, 0.0)
    return (u * s) @ vt
