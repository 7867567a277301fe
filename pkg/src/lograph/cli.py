"""Command-line front end.

Each subcommand wires the core operations into a reproducible file-based
run: all artifacts plus a ``manifest.json`` land in the output directory,
and any run can be repeated bit-identically (wall time aside) with
``--from-manifest``.  The ``LOGRAPH_THREADS`` environment variable caps
seed-level parallelism in ``benchmark``.

Exit codes: 0 success; 2 invalid flags or parameters; 3 I/O failure;
4 solver numerical failure; 5 benchmark without a single successful row.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .alternating import AlternatingConfig, GraphStepConfig, alternate
from .connectivity import TimeSeriesSet, coherence_graph
from .errors import NumericalError, ValidationError
from .evaluate import (
    BENCHMARK_METHODS,
    REPORT_HEADER,
    default_benchmark_config,
    run_benchmark,
)
from .graphs import adjacency_from_laplacian, knn_similarity_graph, laplacian_from_adjacency
from .io import (
    read_edges_tsv,
    read_matrix_csv,
    write_csv_rows,
    write_edges_tsv,
    write_heatmap_svg,
    write_matrix_csv,
)
from .lowrank import LowRankStepConfig, pca_lowrank, rpca
from .synth import SynthSpec, make_instance

EXIT_OK = 0
EXIT_FLAGS = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_EMPTY = 5

DIAG_HEADER_INNER = ["iteration", "objective", "primal_residual", "dual_residual"]
DIAG_HEADER_OUTER = ["outer_iter", "objective", "lowrank_rel_change", "graph_rel_change"]


class _InputError(Exception):
    """Unreadable or malformed input file; maps to exit code 3."""


def _read_matrix(path) -> np.ndarray:
    p = Path(path)
    if not p.is_file():
        raise _InputError(f"input file not found: {p}")
    try:
        return read_matrix_csv(p)
    except (OSError, ValidationError) as exc:
        raise _InputError(f"{p}: {exc}") from exc


def _read_graph(path) -> np.ndarray:
    p = Path(path)
    if not p.is_file():
        raise _InputError(f"graph file not found: {p}")
    try:
        return read_edges_tsv(p)
    except (OSError, ValidationError) as exc:
        raise _InputError(f"{p}: {exc}") from exc


def _ensure_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out_dir: Path, command: str, config: dict, seed: int, artifacts) -> None:
    manifest = {
        "command": command,
        "command_line": " ".join(shlex.quote(a) for a in sys.argv),
        "config": config,
        "seed": seed,
        "artifacts": sorted(str(a) for a in artifacts),
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _require_out(args) -> None:
    if not getattr(args, "out", None):
        raise ValidationError("--out is required (directly or via --from-manifest)")


def _dual_mode(flag_value: str) -> str:
    return flag_value.replace("-", "_")


# ---------------------------------------------------------------- synth


def cmd_synth(args) -> int:
    _require_out(args)
    spec = SynthSpec(p=args.p, n=args.n, r=args.r, q=args.q, k=args.k, seed=args.seed)
    instance = make_instance(spec, args.eigen_mode)
    out = _ensure_dir(args.out)
    write_matrix_csv(out / "X.csv", instance.data)
    write_matrix_csv(out / "L0.csv", instance.low_rank)
    write_matrix_csv(out / "M0.csv", instance.sparse)
    write_edges_tsv(out / "W_true.tsv", instance.adjacency)
    config = {
        "p": args.p, "n": args.n, "r": args.r, "q": args.q, "k": args.k,
        "seed": args.seed, "eigen_mode": args.eigen_mode, "out": str(args.out),
    }
    (out / "spec.txt").write_text(
        "".join(f"{key}={config[key]}\n" for key in ("p", "n", "r", "q", "k", "seed", "eigen_mode"))
    )
    artifacts = ["X.csv", "L0.csv", "M0.csv", "W_true.tsv", "spec.txt"]
    _write_manifest(out, "synth", config, args.seed, artifacts)
    return EXIT_OK


# ------------------------------------------------------------ decompose


def cmd_decompose(args) -> int:
    _require_out(args)
    if not args.input:
        raise ValidationError("--input is required")
    x = _read_matrix(args.input)
    out = _ensure_dir(args.out)
    artifacts = ["L.csv", "diagnostics.csv"]
    config = {
        "input": str(args.input), "method": args.method, "out": str(args.out),
        "delta": args.delta, "gamma": args.gamma, "beta": args.beta,
        "outer_iters": args.outer_iters, "dual_step": args.dual_step,
        "graph": str(args.graph) if args.graph else None, "knn": args.knn,
        "rank": args.rank,
    }

    if args.method == "pca":
        if args.rank is None:
            raise ValidationError("--method pca requires --rank")
        low = pca_lowrank(x, args.rank)
        write_matrix_csv(out / "L.csv", low)
        write_csv_rows(out / "diagnostics.csv", DIAG_HEADER_INNER, [])
    elif args.method == "rpca":
        if args.delta is None:
            raise ValidationError("--method rpca requires --delta")
        result = rpca(x, args.delta, LowRankStepConfig(delta=args.delta))
        write_matrix_csv(out / "L.csv", result.low_rank)
        write_matrix_csv(out / "M.csv", result.sparse)
        write_csv_rows(
            out / "diagnostics.csv",
            DIAG_HEADER_INNER,
            [[int(r[0]), r[1], r[2], r[3]] for r in result.history],
        )
        artifacts.append("M.csv")
    else:
        if args.delta is None:
            raise ValidationError("--method proposed requires --delta")
        if args.graph:
            initial = laplacian_from_adjacency(_read_graph(args.graph))
        elif args.knn:
            initial = laplacian_from_adjacency(knn_similarity_graph(x, args.knn))
        else:
            raise ValidationError("--method proposed requires --graph or --knn")
        cfg = AlternatingConfig(
            lowrank_cfg=LowRankStepConfig(delta=args.delta, gamma=args.gamma),
            graph_cfg=GraphStepConfig(
                gamma=args.gamma, beta=args.beta, dual_step_mode=_dual_mode(args.dual_step)
            ),
            outer_iters=args.outer_iters,
        )
        result = alternate(x, initial, cfg)
        write_matrix_csv(out / "L.csv", result.low_rank)
        write_matrix_csv(out / "M.csv", result.sparse)
        write_edges_tsv(out / "Phi.tsv", adjacency_from_laplacian(result.laplacian))
        write_csv_rows(
            out / "diagnostics.csv",
            DIAG_HEADER_OUTER,
            [[int(r[0]), r[1], r[2], r[3]] for r in result.history],
        )
        artifacts += ["M.csv", "Phi.tsv"]

    _write_manifest(out, "decompose", config, 0, artifacts)
    return EXIT_OK


# ------------------------------------------------------------ coherence


def cmd_coherence(args) -> int:
    _require_out(args)
    if not args.input:
        raise ValidationError("--input is required")
    if args.fs is None or args.freq is None:
        raise ValidationError("--fs and --freq are required")
    data = _read_matrix(args.input)
    ts = TimeSeriesSet(data=data, fs=args.fs)
    weights, warnings = coherence_graph(ts, args.freq, args.cycles)
    out_path = Path(args.out)
    out_dir = _ensure_dir(out_path.parent if out_path.parent != Path("") else Path("."))
    write_edges_tsv(out_path, weights)
    if warnings:
        print(f"warning: {warnings} channel pair(s) had zero in-band energy", file=sys.stderr)
    config = {
        "input": str(args.input), "fs": args.fs, "freq": args.freq,
        "cycles": args.cycles, "out": str(args.out),
    }
    _write_manifest(out_dir, "coherence", config, 0, [out_path.name])
    return EXIT_OK


# ------------------------------------------------------------ benchmark


def _aggregate_lines(reports) -> list[str]:
    lines = [
        f"{'method':<10} {'n':>3} {'lowrank_med':>12} {'lowrank_iqr':>12} "
        f"{'graph_med':>10} {'graph_iqr':>10}"
    ]
    for method in sorted({r.method for r in reports}):
        rows = [r for r in reports if r.method == method and not r.failed]
        if not rows:
            lines.append(f"{method:<10} {0:>3} {'-':>12} {'-':>12} {'-':>10} {'-':>10}")
            continue
        low = np.array([r.lowrank_error for r in rows])
        cells = [f"{np.median(low):>12.4f}", f"{np.subtract(*np.percentile(low, [75, 25])):>12.4f}"]
        graphs = np.array([r.graph_error for r in rows if r.graph_error is not None])
        if graphs.size:
            cells += [f"{np.median(graphs):>10.4f}", f"{np.subtract(*np.percentile(graphs, [75, 25])):>10.4f}"]
        else:
            cells += [f"{'-':>10}", f"{'-':>10}"]
        lines.append(f"{method:<10} {len(rows):>3} " + " ".join(cells))
    return lines


def cmd_benchmark(args) -> int:
    _require_out(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = sorted(set(methods) - set(BENCHMARK_METHODS))
    if not methods or unknown:
        raise ValidationError(f"--methods must name some of {BENCHMARK_METHODS}, got {args.methods!r}")
    out = _ensure_dir(args.out)
    seeds = list(range(args.seed, args.seed + args.seeds))

    def run_one(seed: int):
        spec = SynthSpec(p=args.p, n=args.n, r=args.r, q=args.q, k=args.k, seed=seed)
        config = default_benchmark_config(
            spec,
            delta=args.delta,
            gamma=args.gamma,
            beta=args.beta,
            outer_iters=args.outer_iters,
            dual_step_mode=_dual_mode(args.dual_step),
            knn_k=args.knn,
            eigen_mode=args.eigen_mode,
            rpca_delta=args.rpca_delta,
            pca_rank=args.rank,
        )
        return run_benchmark(spec, methods, config)

    try:
        workers = max(1, int(os.environ.get("LOGRAPH_THREADS", "1")))
    except ValueError:
        workers = 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=min(workers, len(seeds))) as pool:
            outcomes = list(pool.map(run_one, seeds))
    else:
        outcomes = [run_one(seed) for seed in seeds]

    reports = []
    artifacts = ["report.csv"]
    for seed, outcome in zip(seeds, outcomes):
        reports.extend(outcome.reports)
        true_name = f"heatmap_true_seed{seed}.svg"
        write_heatmap_svg(out / true_name, outcome.instance.adjacency,
                          title=f"true adjacency seed={seed}")
        artifacts.append(true_name)
        if outcome.decomposition is not None:
            est_name = f"heatmap_estimated_seed{seed}.svg"
            write_heatmap_svg(out / est_name,
                              adjacency_from_laplacian(outcome.decomposition.laplacian),
                              title=f"estimated adjacency seed={seed}")
            artifacts.append(est_name)
        for rep in outcome.reports:
            if rep.failed:
                print(f"warning: {rep.method} failed on seed {seed}: {rep.message}", file=sys.stderr)

    write_csv_rows(out / "report.csv", REPORT_HEADER, [r.as_row() for r in reports])
    config = {
        "p": args.p, "n": args.n, "r": args.r, "q": args.q, "k": args.k,
        "seed": args.seed, "seeds": args.seeds, "methods": args.methods,
        "delta": args.delta, "gamma": args.gamma, "beta": args.beta,
        "outer_iters": args.outer_iters, "dual_step": args.dual_step,
        "knn": args.knn, "eigen_mode": args.eigen_mode,
        "rpca_delta": args.rpca_delta, "rank": args.rank, "out": str(args.out),
    }
    _write_manifest(out, "benchmark", config, args.seed, artifacts)
    print("\n".join(_aggregate_lines(reports)))
    return EXIT_OK if any(not r.failed for r in reports) else EXIT_EMPTY


# ----------------------------------------------------------------- main


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lograph",
        description="Low-rank recovery with joint graph refinement: generators, solvers, benchmarks.",
    )
    parser.add_argument("--version", action="version", version=f"lograph {__version__}")
    sub = parser.add_subparsers(dest="command_name")

    def add_common(p):
        p.add_argument("--out", default=None, help="output directory (or file for coherence)")
        p.add_argument("--from-manifest", default=None,
                       help="re-run with the configuration stored in a manifest.json")

    p = sub.add_parser("synth", help="generate a synthetic benchmark instance")
    p.add_argument("--p", type=int, default=30, help="number of features/nodes")
    p.add_argument("--n", type=int, default=50, help="number of samples")
    p.add_argument("--r", type=int, default=3, help="rank of the clean component")
    p.add_argument("--q", type=float, default=0.2, help="edge probability")
    p.add_argument("--k", type=float, default=0.4, help="corrupted-entry fraction")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eigen-mode", choices=["smallest", "largest"], default="smallest")
    add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("decompose", help="decompose a data matrix from CSV")
    p.add_argument("--input", required=False, default=None, help="data matrix CSV")
    p.add_argument("--method", choices=["proposed", "rpca", "pca"], default="proposed")
    p.add_argument("--graph", default=None, help="initial graph edge-list TSV")
    p.add_argument("--knn", type=int, default=None, help="build the initial graph with K neighbors")
    p.add_argument("--delta", type=float, default=None, help="sparsity weight")
    p.add_argument("--gamma", type=float, default=1.5, help="graph smoothness weight")
    p.add_argument("--beta", type=float, default=1.5, help="graph Frobenius weight")
    p.add_argument("--outer-iters", type=int, default=10)
    p.add_argument("--dual-step", choices=["standard", "paper-literal"], default="standard")
    p.add_argument("--rank", type=int, default=None, help="target rank (pca)")
    add_common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("coherence", help="pairwise coherence graph from a multichannel CSV")
    p.add_argument("--input", required=False, default=None, help="channels-by-samples CSV")
    p.add_argument("--fs", type=float, default=None, help="sampling rate, Hz")
    p.add_argument("--freq", type=float, default=None, help="analysis frequency, Hz")
    p.add_argument("--cycles", type=int, default=7, help="wavelet cycles")
    add_common(p)
    p.set_defaults(func=cmd_coherence)

    p = sub.add_parser("benchmark", help="run the synthetic benchmark over seeds")
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--p", type=int, default=30)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--q", type=float, default=0.2)
    p.add_argument("--k", type=float, default=0.4)
    p.add_argument("--methods", default=",".join(BENCHMARK_METHODS))
    p.add_argument("--delta", type=float, default=None,
                   help="joint-method sparsity weight (default 2.5/sqrt(n))")
    p.add_argument("--gamma", type=float, default=1.5)
    p.add_argument("--beta", type=float, default=1.5)
    p.add_argument("--outer-iters", type=int, default=10)
    p.add_argument("--dual-step", choices=["standard", "paper-literal"], default="paper-literal")
    p.add_argument("--knn", type=int, default=10)
    p.add_argument("--eigen-mode", choices=["smallest", "largest"], default="smallest")
    p.add_argument("--rpca-delta", type=float, default=None,
                   help="robust-baseline weight (default 1.3/sqrt(max(p,n)))")
    p.add_argument("--rank", type=int, default=None, help="truncation rank for pca (default r)")
    add_common(p)
    p.set_defaults(func=cmd_benchmark)
    return parser


def _apply_manifest(args) -> None:
    path = Path(args.from_manifest)
    if not path.is_file():
        raise _InputError(f"manifest not found: {path}")
    try:
        manifest = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise _InputError(f"{path}: {exc}") from exc
    if manifest.get("command") != args.command_name:
        raise ValidationError(
            f"manifest is for {manifest.get('command')!r}, not {args.command_name!r}"
        )
    new_out = args.out
    for key, value in manifest.get("config", {}).items():
        setattr(args, key, value)
    if new_out is not None:
        args.out = new_out


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_FLAGS
    if not getattr(args, "command_name", None):
        parser.print_help(sys.stderr)
        return EXIT_FLAGS
    try:
        if getattr(args, "from_manifest", None):
            _apply_manifest(args)
        return args.func(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
