import numpy as np
import pytest

from lograph import SynthSpec
from lograph.evaluate import run_benchmark

BENCH_SEEDS = list(range(10))


@pytest.fixture(scope="session")
def benchmark_outcomes():
    """Full benchmark (10 seeds, published configuration) shared by the
    acceptance criteria; ~20 s once per session.  Returns
    ``(outcomes_by_seed, elapsed_seconds)``."""
    import time

    start = time.perf_counter()
    outcomes = {}
    for seed in BENCH_SEEDS:
        spec = SynthSpec(p=30, n=50, r=3, q=0.2, k=0.4, seed=seed)
        outcomes[seed] = run_benchmark(spec)
    return outcomes, time.perf_counter() - start


def random_laplacian(rng, p):
    """Valid Laplacian from random nonnegative weights."""
    w = rng.random((p, p))
    w = np.triu(w, 1)
    w = w + w.T
    lap = -w
    np.fill_diagonal(lap, w.sum(axis=1))
    return lap
