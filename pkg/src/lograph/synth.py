"""Synthetic benchmark generator: random graph, smooth low-rank signal,
sign corruption.

All generators are pure functions of their parameters and a 64-bit seed.
Randomness is drawn from PCG64 streams split per component — stream 0 for
the graph, stream 1 for the factor matrix, stream 2 for the corruption —
so each piece of an instance can be regenerated independently:

    rng = numpy.random.default_rng(numpy.random.SeedSequence(seed, spawn_key=(stream,)))
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graphs import laplacian_from_adjacency

__all__ = [
    "SynthSpec",
    "SynthInstance",
    "gen_er_graph",
    "gen_lowrank",
    "gen_sparse_corruption",
    "recon_error",
    "make_instance",
    "EIGEN_MODES",
]

EIGEN_MODES = ("smallest", "largest")

_STREAM_GRAPH = 0
_STREAM_FACTORS = 1
_STREAM_CORRUPTION = 2


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


@dataclass(frozen=True)
class SynthSpec:
    """Instance parameters: dimension, samples, rank, edge probability,
    corruption fraction, seed."""

    p: int
    n: int
    r: int
    q: float
    k: float
    seed: int = 0

    def __post_init__(self):
        for name in ("p", "n", "r"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be a positive integer")
        if self.r > self.p or self.r > self.n:
            raise ValidationError(f"rank {self.r} exceeds min(p, n) = {min(self.p, self.n)}")
        if not 0 < self.q < 1:
            raise ValidationError(f"edge probability q must lie in (0, 1), got {self.q}")
        if not 0 <= self.k <= 1:
            raise ValidationError(f"corruption fraction k must lie in [0, 1], got {self.k}")


@dataclass
class SynthInstance:
    """Generated data with its ground truth.  ``data == low_rank + sparse``
    holds exactly (assembled by addition)."""

    data: np.ndarray
    low_rank: np.ndarray
    sparse: np.ndarray
    adjacency: np.ndarray
    laplacian: np.ndarray


def gen_er_graph(p: int, q: float, seed: int) -> np.ndarray:
    """Random graph: each unordered pair is linked independently with
    probability ``q``; present edges get Uniform(0, 1) weights."""
    if not 0 < q < 1:
        raise ValidationError(f"edge probability q must lie in (0, 1), got {q}")
    rng = _rng(seed, _STREAM_GRAPH)
    iu = np.triu_indices(p, k=1)
    m = iu[0].size
    present = rng.random(m) < q
    upper = np.where(present, rng.random(m), 0.0)
    weights = np.zeros((p, p))
    weights[iu] = upper
    weights += weights.T
    return weights


def gen_lowrank(
    laplacian, r: int, n: int, seed: int, eigen_mode: str = "smallest"
) -> np.ndarray:
    """Rank-``r`` signal spanned by ``r`` eigenvectors of the Laplacian.

    The factor entries are i.i.d. Normal(0, 1/p).  ``eigen_mode`` selects
    the eigenvectors of the smallest eigenvalues (graph-smooth signal, the
    default) or of the largest.
    """
    if eigen_mode not in EIGEN_MODES:
        raise ValidationError(f"eigen_mode must be one of {EIGEN_MODES}, got {eigen_mode!r}")
    lap = np.asarray(laplacian, dtype=float)
    p = lap.shape[0]
    if r > p:
        raise ValidationError(f"rank {r} exceeds dimension {p}")
    try:
        _, vecs = np.linalg.eigh(lap)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigh on symmetric input
        raise ValidationError(f"eigendecomposition failed: {exc}") from exc
    basis = vecs[:, :r] if eigen_mode == "smallest" else vecs[:, p - r:]
    rng = _rng(seed, _STREAM_FACTORS)
    factors = rng.normal(0.0, 1.0 / np.sqrt(p), size=(n, r))
    return basis @ factors.T


def gen_sparse_corruption(p: int, n: int, k: float, seed: int) -> np.ndarray:
    """Sign corruption: each entry is +1 or -1 with probability k/2 each,
    0 otherwise."""
    if not 0 <= k <= 1:
        raise ValidationError(f"corruption fraction k must lie in [0, 1], got {k}")
    rng = _rng(seed, _STREAM_CORRUPTION)
    u = rng.random((p, n))
    return np.where(u < k / 2.0, 1.0, np.where(u < k, -1.0, 0.0))


def recon_error(estimate, truth) -> float:
    """Relative Frobenius error ||estimate - truth||_F / ||truth||_F."""
    est = np.asarray(estimate, dtype=float)
    tru = np.asarray(truth, dtype=float)
    if est.shape != tru.shape:
        raise ValidationError(f"shape mismatch: {est.shape} vs {tru.shape}")
    denom = float(np.linalg.norm(tru))
    if denom == 0.0:
        raise ValidationError("reference matrix has zero norm")
    return float(np.linalg.norm(est - tru)) / denom


def make_instance(spec: SynthSpec, eigen_mode: str = "smallest") -> SynthInstance:
    """Assemble a full instance from a spec: graph, smooth low-rank part,
    corruption, and their sum."""
    weights = gen_er_graph(spec.p, spec.q, spec.seed)
    lap = laplacian_from_adjacency(weights)
    low = gen_lowrank(lap, spec.r, spec.n, spec.seed, eigen_mode)
    sparse = gen_sparse_corruption(spec.p, spec.n, spec.k, spec.seed)
    return SynthInstance(
        data=low + sparse,
        low_rank=low,
        sparse=sparse,
        adjacency=weights,
        laplacian=lap,
    )
