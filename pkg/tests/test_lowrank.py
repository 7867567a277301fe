import numpy as np
import pytest

from lograph import (
    LowRankStepConfig,
    SynthSpec,
    ValidationError,
    gen_er_graph,
    laplacian_from_adjacency,
    make_instance,
    pca_lowrank,
    recon_error,
    rpca,
    smoothness,
    solve_lowrank_step,
)

# Objectives of the same three problems solved by an interior-point-style
# conic solver (SCS at eps=1e-10) on the instance built in oracle_instance():
# (gamma, delta) -> optimal objective value.
CONIC_OBJECTIVES = {
    (0.0, 0.3): 27.233143419072,
    (1.5, 0.3): 28.863705832537,
    (0.7, 0.15): 14.456963816446,
}


def oracle_instance():
    rng = np.random.default_rng(7)
    p, n = 8, 10
    phi = laplacian_from_adjacency(gen_er_graph(p, 0.4, 3))
    x = rng.standard_normal((p, n)) + np.where(
        rng.random((p, n)) < 0.3, rng.choice([-3.0, 3.0], (p, n)), 0
    )
    return x, phi


class TestConfig:
    def test_rejects_bad_values(self):
        with pytest.raises(ValidationError):
            LowRankStepConfig(delta=0.0)
        with pytest.raises(ValidationError):
            LowRankStepConfig(delta=0.1, gamma=-1.0)
        with pytest.raises(ValidationError):
            LowRankStepConfig(delta=0.1, rho=0.0)
        with pytest.raises(ValidationError):
            LowRankStepConfig(delta=0.1, max_iters=0)
        with pytest.raises(ValidationError):
            LowRankStepConfig(delta=0.1, tol_rel=1.5)


class TestSolveLowRankStep:
    def test_matches_conic_solver(self):
        x, phi = oracle_instance()
        for (gamma, delta), expected in CONIC_OBJECTIVES.items():
            cfg = LowRankStepConfig(
                delta=delta, gamma=gamma, max_iters=20000, tol_abs=1e-12, tol_rel=1e-10
            )
            result = solve_lowrank_step(x, phi if gamma > 0 else None, cfg)
            assert result.converged
            assert result.objective == pytest.approx(expected, abs=1e-6)

    def test_clean_rank_one_input(self):
        rng = np.random.default_rng(10)
        x = 5.0 * np.outer(rng.standard_normal(12), rng.standard_normal(20))
        result = solve_lowrank_step(x, None, LowRankStepConfig(delta=5.0))
        assert np.linalg.norm(result.sparse) / np.linalg.norm(x) <= 1e-4
        assert recon_error(result.low_rank, x) <= 1e-3

    def test_zero_input_fixed_point(self):
        result = rpca(np.zeros((6, 8)), 0.5)
        assert np.array_equal(result.low_rank, np.zeros((6, 8)))
        assert np.array_equal(result.sparse, np.zeros((6, 8)))

    def test_feasibility_at_convergence(self):
        x, phi = oracle_instance()
        result = solve_lowrank_step(x, phi, LowRankStepConfig(delta=0.3, gamma=1.5))
        assert result.converged
        feas = np.linalg.norm(x - result.low_rank - result.sparse)
        assert feas / max(np.linalg.norm(x), 1.0) <= 1e-5

    def test_gamma_zero_identical_to_rpca(self):
        x, _ = oracle_instance()
        cfg = LowRankStepConfig(delta=0.3, gamma=0.0)
        a = solve_lowrank_step(x, None, cfg)
        b = rpca(x, 0.3, cfg)
        assert np.array_equal(a.low_rank, b.low_rank)
        assert a.objective == b.objective

    def test_graph_term_improves_recovery_on_paired_seed(self):
        # Same instance, same delta: with the true graph the error must be
        # strictly smaller than without any graph term.
        inst = make_instance(SynthSpec(p=30, n=50, r=3, q=0.2, k=0.4, seed=0))
        delta = 2.5 / np.sqrt(50)
        cfg = LowRankStepConfig(delta=delta, gamma=1.5, max_iters=2000, adaptive_rho=True)
        with_graph = solve_lowrank_step(inst.data, inst.laplacian, cfg)
        without = rpca(inst.data, delta, cfg)
        err_graph = recon_error(with_graph.low_rank, inst.low_rank)
        err_plain = recon_error(without.low_rank, inst.low_rank)
        assert err_graph < err_plain

    def test_smoothness_reduced_by_graph_term(self):
        delta = 2.5 / np.sqrt(50)
        cfg = LowRankStepConfig(delta=delta, gamma=1.5, max_iters=2000, adaptive_rho=True)
        wins = 0
        for seed in range(10):
            inst = make_instance(SynthSpec(p=30, n=50, r=3, q=0.2, k=0.4, seed=seed))
            smooth = solve_lowrank_step(inst.data, inst.laplacian, cfg)
            plain = rpca(inst.data, delta, cfg)
            if smoothness(smooth.low_rank, inst.laplacian) <= smoothness(
                plain.low_rank, inst.laplacian
            ):
                wins += 1
        assert wins >= 9

    def test_history_shape_and_final_state(self):
        x, phi = oracle_instance()
        result = solve_lowrank_step(x, phi, LowRankStepConfig(delta=0.3, gamma=1.5))
        assert result.history.shape == (result.iterations, 4)
        assert np.all(np.isfinite(result.history))
        # Converged objective is far below the starting one.
        assert result.history[-1, 1] < result.history[0, 1]

    def test_adaptive_rho_reaches_same_solution(self):
        x, phi = oracle_instance()
        fixed = solve_lowrank_step(x, phi, LowRankStepConfig(delta=0.3, gamma=1.5, max_iters=5000))
        adaptive = solve_lowrank_step(
            x, phi, LowRankStepConfig(delta=0.3, gamma=1.5, max_iters=5000, adaptive_rho=True)
        )
        assert adaptive.objective == pytest.approx(fixed.objective, abs=1e-5)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            solve_lowrank_step(np.zeros((3, 4)), np.zeros((5, 5)), LowRankStepConfig(delta=0.1, gamma=1.0))

    def test_nonfinite_input(self):
        x = np.zeros((3, 3))
        x[0, 0] = np.nan
        with pytest.raises(ValidationError):
            rpca(x, 0.5)

    def test_gamma_without_laplacian(self):
        with pytest.raises(ValidationError):
            solve_lowrank_step(np.zeros((3, 3)), None, LowRankStepConfig(delta=0.1, gamma=1.0))


class TestPcaLowrank:
    def test_full_rank_reconstructs(self):
        rng = np.random.default_rng(20)
        x = rng.standard_normal((5, 8))
        assert np.linalg.norm(pca_lowrank(x, 5) - x) <= 1e-10 * np.linalg.norm(x)

    def test_diagonal_case(self):
        out = pca_lowrank(np.diag([5.0, 3.0, 1.0]), 2)
        assert np.allclose(out, np.diag([5.0, 3.0, 0.0]), atol=1e-12)

    def test_residual_matches_tail_singular_values(self):
        rng = np.random.default_rng(21)
        x = rng.standard_normal((7, 11))
        sigma = np.linalg.svd(x, compute_uv=False)
        for k in (1, 3, 5):
            residual = np.linalg.norm(x - pca_lowrank(x, k))
            expected = np.sqrt((sigma[k:] ** 2).sum())
            assert residual == pytest.approx(expected, rel=1e-9)

    def test_eckart_young_spot_check(self):
        rng = np.random.default_rng(22)
        x = rng.standard_normal((6, 9))
        k = 2
        best = np.linalg.norm(x - pca_lowrank(x, k))
        for _ in range(100):
            cand = np.outer(rng.standard_normal(6), rng.standard_normal(9))
            cand += np.outer(rng.standard_normal(6), rng.standard_normal(9))
            scale = np.linalg.norm(x) / max(np.linalg.norm(cand), 1e-9)
            assert best <= np.linalg.norm(x - cand * scale) + 1e-12

    def test_k_out_of_range(self):
        with pytest.raises(ValidationError):
            pca_lowrank(np.zeros((3, 4)), 4)
        with pytest.raises(ValidationError):
            pca_lowrank(np.zeros((3, 4)), 0)


class TestRpcaApi:
    def test_delta_overrides_config(self):
        x, _ = oracle_instance()
        cfg = LowRankStepConfig(delta=9.9, gamma=3.0)
        result = rpca(x, 0.3, cfg)
        baseline = rpca(x, 0.3)
        assert result.objective == pytest.approx(baseline.objective, abs=1e-9)

    def test_config_not_mutated(self):
        x, _ = oracle_instance()
        cfg = LowRankStepConfig(delta=9.9, gamma=3.0)
        rpca(x, 0.3, cfg)
        assert cfg.delta == 9.9 and cfg.gamma == 3.0
