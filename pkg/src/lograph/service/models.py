"""Pydantic request/response models for the HTTP service.

Matrices travel as nested lists of floats (JSON); row-major, matching the
CSV layout used on disk.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

Matrix = list[list[float]]

# Cross-validated sparsity weight for the 50-sample synthetic benchmark.
DEFAULT_DELTA = 2.5 / 50**0.5


class SynthRequest(BaseModel):
    p: int = Field(default=30, ge=1)
    n: int = Field(default=50, ge=1)
    r: int = Field(default=3, ge=1)
    q: float = Field(default=0.2, gt=0, lt=1)
    k: float = Field(default=0.4, ge=0, le=1)
    seed: int = 0
    eigen_mode: Literal["smallest", "largest"] = "smallest"


class SynthResponse(BaseModel):
    data: Matrix
    low_rank: Matrix
    sparse: Matrix
    adjacency: Matrix


class DecomposeRequest(BaseModel):
    data: Matrix
    method: Literal["proposed", "rpca", "pca"] = "proposed"
    delta: float = Field(default=DEFAULT_DELTA, gt=0)
    gamma: float = Field(default=1.5, ge=0)
    beta: float = Field(default=1.5, gt=0)
    outer_iters: int = Field(default=10, ge=1)
    dual_step: Literal["standard", "paper-literal"] = "standard"
    knn_k: Optional[int] = Field(default=None, ge=1)
    graph: Optional[Matrix] = None  # initial adjacency; overrides knn_k
    rank: Optional[int] = Field(default=None, ge=1)  # pca only


class DecomposeResponse(BaseModel):
    low_rank: Matrix
    sparse: Optional[Matrix] = None
    laplacian: Optional[Matrix] = None
    iterations: int = 0
    objective: Optional[float] = None
    converged: bool = True


class CoherenceRequest(BaseModel):
    data: Matrix
    fs: float = Field(gt=0)
    freq: float = Field(gt=0)
    cycles: int = Field(default=7, ge=1)


class CoherenceResponse(BaseModel):
    weights: Matrix
    warnings: int


class BenchmarkRequest(BaseModel):
    p: int = Field(default=30, ge=1)
    n: int = Field(default=50, ge=1)
    r: int = Field(default=3, ge=1)
    q: float = Field(default=0.2, gt=0, lt=1)
    k: float = Field(default=0.4, ge=0, le=1)
    seed: int = 0
    seeds: int = Field(default=1, ge=1)
    methods: list[Literal["proposed", "rpca", "pca"]] = ["proposed", "rpca", "pca"]
    delta: Optional[float] = Field(default=None, gt=0)
    gamma: float = Field(default=1.5, ge=0)
    beta: float = Field(default=1.5, gt=0)
    outer_iters: int = Field(default=10, ge=1)
    dual_step: Literal["standard", "paper-literal"] = "paper-literal"
    knn_k: int = Field(default=10, ge=1)
    eigen_mode: Literal["smallest", "largest"] = "smallest"
    rpca_delta: Optional[float] = Field(default=None, gt=0)
    rank: Optional[int] = Field(default=None, ge=1)


class ReportRow(BaseModel):
    method: str
    lowrank_error: float
    graph_error: Optional[float] = None
    rank: int
    seed: int
    wall_time_s: float
    failed: bool = False
    message: str = ""


class BenchmarkResponse(BaseModel):
    reports: list[ReportRow]
