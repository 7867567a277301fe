"""FastAPI service exposing the core operations.

Run with:  uvicorn lograph.service.app:app
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..alternating import AlternatingConfig, GraphStepConfig, alternate
from ..connectivity import TimeSeriesSet, coherence_graph
from ..errors import NumericalError, ValidationError
from ..evaluate import default_benchmark_config, run_benchmark
from ..graphs import knn_similarity_graph, laplacian_from_adjacency
from ..lowrank import LowRankStepConfig, pca_lowrank, rpca
from ..synth import SynthSpec, make_instance
from .models import (
    BenchmarkRequest,
    BenchmarkResponse,
    CoherenceRequest,
    CoherenceResponse,
    DecomposeRequest,
    DecomposeResponse,
    ReportRow,
    SynthRequest,
    SynthResponse,
)

app = FastAPI(title="lograph", version=__version__)


def _mat(arr: np.ndarray) -> list[list[float]]:
    return np.asarray(arr, dtype=float).tolist()


def _mode(name: str) -> str:
    return name.replace("-", "_")


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/synth", response_model=SynthResponse)
def synth(req: SynthRequest) -> SynthResponse:
    try:
        spec = SynthSpec(p=req.p, n=req.n, r=req.r, q=req.q, k=req.k, seed=req.seed)
        inst = make_instance(spec, req.eigen_mode)
    except ValidationError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return SynthResponse(
        data=_mat(inst.data),
        low_rank=_mat(inst.low_rank),
        sparse=_mat(inst.sparse),
        adjacency=_mat(inst.adjacency),
    )


@app.post("/decompose", response_model=DecomposeResponse)
def decompose(req: DecomposeRequest) -> DecomposeResponse:
    x = np.asarray(req.data, dtype=float)
    try:
        if req.method == "pca":
            if req.rank is None:
                raise ValidationError("pca requires 'rank'")
            return DecomposeResponse(low_rank=_mat(pca_lowrank(x, req.rank)))
        if req.method == "rpca":
            cfg = LowRankStepConfig(delta=req.delta)
            result = rpca(x, req.delta, cfg)
            return DecomposeResponse(
                low_rank=_mat(result.low_rank),
                sparse=_mat(result.sparse),
                iterations=result.iterations,
                objective=result.objective,
                converged=result.converged,
            )
        if req.graph is not None:
            initial = laplacian_from_adjacency(np.asarray(req.graph, dtype=float))
        elif req.knn_k is not None:
            initial = laplacian_from_adjacency(knn_similarity_graph(x, req.knn_k))
        else:
            raise ValidationError("the joint method requires 'graph' or 'knn_k'")
        cfg = AlternatingConfig(
            lowrank_cfg=LowRankStepConfig(delta=req.delta, gamma=req.gamma),
            graph_cfg=GraphStepConfig(
                gamma=req.gamma, beta=req.beta, dual_step_mode=_mode(req.dual_step)
            ),
            outer_iters=req.outer_iters,
        )
        result = alternate(x, initial, cfg)
    except ValidationError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except NumericalError as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc
    step = result.lowrank_result
    return DecomposeResponse(
        low_rank=_mat(result.low_rank),
        sparse=_mat(result.sparse),
        laplacian=_mat(result.laplacian),
        iterations=result.outer_iterations,
        objective=step.objective,
        converged=result.converged,
    )


@app.post("/coherence", response_model=CoherenceResponse)
def coherence(req: CoherenceRequest) -> CoherenceResponse:
    try:
        ts = TimeSeriesSet(data=np.asarray(req.data, dtype=float), fs=req.fs)
        weights, warnings = coherence_graph(ts, req.freq, req.cycles)
    except ValidationError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except NumericalError as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc
    return CoherenceResponse(weights=_mat(weights), warnings=warnings)


@app.post("/benchmark", response_model=BenchmarkResponse)
def benchmark(req: BenchmarkRequest) -> BenchmarkResponse:
    rows: list[ReportRow] = []
    try:
        for seed in range(req.seed, req.seed + req.seeds):
            spec = SynthSpec(p=req.p, n=req.n, r=req.r, q=req.q, k=req.k, seed=seed)
            config = default_benchmark_config(
                spec,
                delta=req.delta,
                gamma=req.gamma,
                beta=req.beta,
                outer_iters=req.outer_iters,
                dual_step_mode=_mode(req.dual_step),
                knn_k=req.knn_k,
                eigen_mode=req.eigen_mode,
                rpca_delta=req.rpca_delta,
                pca_rank=req.rank,
            )
            outcome = run_benchmark(spec, req.methods, config)
            for rep in outcome.reports:
                rows.append(
                    ReportRow(
                        method=rep.method,
                        lowrank_error=rep.lowrank_error if math.isfinite(rep.lowrank_error) else -1.0,
                        graph_error=rep.graph_error,
                        rank=rep.rank,
                        seed=rep.seed,
                        wall_time_s=rep.wall_time,
                        failed=rep.failed,
                        message=rep.message,
                    )
                )
    except ValidationError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return BenchmarkResponse(reports=rows)
