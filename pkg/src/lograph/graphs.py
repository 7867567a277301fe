"""Graph containers and Laplacian algebra.

Graphs are plain numpy arrays.  An adjacency matrix is a symmetric,
nonnegative ``(p, p)`` array with zero diagonal; a combinatorial Laplacian
is a symmetric ``(p, p)`` array with nonpositive off-diagonals whose
diagonal equals the negated off-diagonal row sum.  The validators raise
:class:`~lograph.errors.ValidationError` naming the first offending entry,
so callers validate once at a boundary and hand raw arrays to the numeric
kernels.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ValidationError

__all__ = [
    "validate_adjacency",
    "validate_laplacian",
    "laplacian_from_adjacency",
    "project_to_laplacian_set",
    "smoothness",
    "knn_similarity_graph",
    "adjacency_from_laplacian",
]

# Row sums of a valid Laplacian must vanish to this relative tolerance.
ROW_SUM_RTOL = 1e-12
# Random quadratic forms v' Phi v may not fall below -PSD_TOL * scale.
PSD_TOL = 1e-10
_N_PSD_PROBES = 16


def _as_square(mat, name: str) -> np.ndarray:
    arr = np.asarray(mat, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    return arr


def _check_finite(arr: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(arr)):
        i, j = np.argwhere(~np.isfinite(arr))[0]
        raise ValidationError(f"{name}[{i},{j}] = {arr[i, j]!r} is not finite")


def validate_adjacency(weights, name: str = "adjacency") -> np.ndarray:
    """Check symmetry, nonnegativity and zero diagonal; return the array.

    Raises :class:`ValidationError` naming the first violating index pair.
    """
    arr = _as_square(weights, name)
    _check_finite(arr, name)
    bad = np.argwhere(arr != arr.T)
    if bad.size:
        i, j = bad[0]
        raise ValidationError(
            f"{name} is not symmetric at ({i},{j}): {arr[i, j]!r} != {arr[j, i]!r}"
        )
    bad = np.argwhere(arr < 0)
    if bad.size:
        i, j = bad[0]
        raise ValidationError(f"{name}[{i},{j}] = {arr[i, j]!r} is negative")
    bad = np.argwhere(np.diag(arr) != 0)
    if bad.size:
        i = int(bad[0][0])
        raise ValidationError(f"{name}[{i},{i}] = {arr[i, i]!r}, diagonal must be zero")
    return arr


def validate_laplacian(entries, name: str = "laplacian", check_psd: bool = True) -> np.ndarray:
    """Check membership in the valid-Laplacian set; return the array.

    The set comprises symmetric matrices with nonpositive off-diagonals and
    zero row sums.  Positive semidefiniteness is implied by that structure
    and is probed with a handful of fixed random quadratic forms.
    """
    arr = _as_square(entries, name)
    _check_finite(arr, name)
    bad = np.argwhere(arr != arr.T)
    if bad.size:
        i, j = bad[0]
        raise ValidationError(
            f"{name} is not symmetric at ({i},{j}): {arr[i, j]!r} != {arr[j, i]!r}"
        )
    off = arr.copy()
    np.fill_diagonal(off, 0.0)
    bad = np.argwhere(off > 0)
    if bad.size:
        i, j = bad[0]
        raise ValidationError(f"{name}[{i},{j}] = {arr[i, j]!r} must be nonpositive")
    row_sums = arr.sum(axis=1)
    scale = np.maximum(1.0, np.abs(arr).sum(axis=1))
    bad = np.argwhere(np.abs(row_sums) > ROW_SUM_RTOL * scale)
    if bad.size:
        i = int(bad[0][0])
        raise ValidationError(f"{name} row {i} sums to {row_sums[i]!r}, expected 0")
    if check_psd and arr.shape[0] > 0:
        rng = np.random.default_rng(0)
        floor = -PSD_TOL * max(1.0, float(np.linalg.norm(arr)))
        for _ in range(_N_PSD_PROBES):
            v = rng.standard_normal(arr.shape[0])
            v /= max(np.linalg.norm(v), 1e-300)
            if float(v @ arr @ v) < floor:
                raise ValidationError(f"{name} fails a random PSD probe")
    return arr


def laplacian_from_adjacency(weights) -> np.ndarray:
    """Return the combinatorial Laplacian (degree matrix minus weights)."""
    arr = validate_adjacency(weights)
    lap = -arr.copy()
    np.fill_diagonal(lap, arr.sum(axis=1))
    return lap


def adjacency_from_laplacian(entries) -> np.ndarray:
    """Recover the edge-weight matrix from a valid Laplacian."""
    arr = validate_laplacian(entries, check_psd=False)
    weights = -arr
    np.fill_diagonal(weights, 0.0)
    # -0.0 entries arise from negating zeros; normalize them away.
    return weights + 0.0


def project_to_laplacian_set(mat) -> np.ndarray:
    """Project a square matrix onto the valid-Laplacian set.

    Symmetrizes, clamps off-diagonals to nonpositive values, and rebuilds
    the diagonal as the negated off-diagonal row sum.  Within the set the
    diagonal is a linear function of the off-diagonals, so the projection
    acts on the off-diagonal block; the map is exactly idempotent.
    """
    arr = _as_square(mat, "matrix")
    _check_finite(arr, "matrix")
    sym = (arr + arr.T) / 2.0
    off = np.minimum(sym, 0.0)
    np.fill_diagonal(off, 0.0)
    out = off
    np.fill_diagonal(out, -off.sum(axis=1))
    return out


def smoothness(signal, laplacian) -> float:
    """Quadratic-form signal variation tr(S' Phi S) across the graph.

    Equals half the edge-weighted sum of squared row differences of the
    signal, hence is nonnegative whenever ``laplacian`` is a valid
    Laplacian.
    """
    sig = np.asarray(signal, dtype=float)
    lap = np.asarray(laplacian, dtype=float)
    if sig.ndim == 1:
        sig = sig[:, None]
    if lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
        raise ValidationError(f"laplacian must be square, got shape {lap.shape}")
    if sig.shape[0] != lap.shape[0]:
        raise ValidationError(
            f"signal has {sig.shape[0]} rows but laplacian is {lap.shape[0]}x{lap.shape[1]}"
        )
    return float(np.sum(sig * (lap @ sig)))


def knn_similarity_graph(data, k: int) -> np.ndarray:
    """Build a K-nearest-neighbor similarity graph over the rows of ``data``.

    Each row is a node; every node is linked to at least its ``k`` nearest
    rows in Euclidean distance.  Retained edges get Gaussian-kernel weights
    ``exp(-d^2 / (2 sigma^2))`` with ``sigma`` the median distance over all
    retained pairs, and the directed selections are symmetrized by taking
    the maximum.  Weights therefore lie in (0, 1]; duplicate rows receive
    weight 1.
    """
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2:
        raise ValidationError(f"data must be 2-D, got shape {arr.shape}")
    _check_finite(arr, "data")
    p = arr.shape[0]
    if not 0 < k < p:
        raise ValidationError(f"k must satisfy 0 < k < {p}, got {k}")

    dist = cdist(arr, arr)
    np.fill_diagonal(dist, np.inf)
    neighbors = np.argsort(dist, axis=1, kind="stable")[:, :k]
    chosen = np.zeros((p, p), dtype=bool)
    rows = np.repeat(np.arange(p), k)
    chosen[rows, neighbors.ravel()] = True
    retained = chosen | chosen.T

    iu = np.triu_indices(p, k=1)
    pair_dists = dist[iu][retained[iu]]
    sigma = float(np.median(pair_dists)) if pair_dists.size else 0.0
    if sigma == 0.0:
        # All retained pairs coincide; every retained edge gets weight 1.
        sigma = 1.0

    weights = np.where(retained, np.exp(-(dist**2) / (2.0 * sigma**2)), 0.0)
    np.fill_diagonal(weights, 0.0)
    return weights
