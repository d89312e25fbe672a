"""The absorbing loop-erased walk sampler against its determinantal laws."""

import numpy as np
import pytest

from graphdpp import (
    Graph,
    SbmParams,
    eigendecompose,
    expected_sample_size,
    laplacian,
    sbm_generate,
    tune_q,
    wilson_kernel_explicit,
    wilson_sample,
)
from graphdpp.errors import InvalidParams, NoConvergence, WatchdogExceeded

from conftest import dpp_exact_law, empirical_tv


class TestBasics:
    def test_rejects_nonpositive_q(self, k2):
        with pytest.raises(InvalidParams):
            wilson_sample(k2, 0.0, 0)

    def test_edgeless_returns_all_nodes(self, edgeless5):
        for seed in range(5):
            s = wilson_sample(edgeless5, 0.3, seed)
            assert sorted(s.nodes.tolist()) == [0, 1, 2, 3, 4]

    def test_weights_left_unfilled(self, k2):
        assert wilson_sample(k2, 1.0, 0).weights is None

    def test_size_bounds_and_components(self, two_k2):
        rng = np.random.default_rng(1)
        for _ in range(200):
            s = wilson_sample(two_k2, 0.5, rng)
            assert 2 <= len(s) <= 4  # at least one root per component
            comps = {0 if n < 2 else 1 for n in s.nodes}
            assert comps == {0, 1}

    def test_k2_mean_size(self, k2):
        # E|Y| = q/(q+0) + q/(q+2) = 3/2 at q = 2
        rng = np.random.default_rng(2)
        runs = 10_000
        sizes = np.array([len(wilson_sample(k2, 2.0, rng)) for _ in range(runs)])
        se = np.sqrt(0.25 / runs)
        assert abs(sizes.mean() - 1.5) <= 3 * se

    def test_watchdog(self):
        g = sbm_generate(SbmParams(n=50, k_comm=2, c=6.0, eps=0.3), 0)
        with pytest.raises(WatchdogExceeded):
            wilson_sample(g, 1e-9, 0, watchdog=20)

    def test_deterministic_under_seed(self):
        g = sbm_generate(SbmParams(n=50, k_comm=2, c=6.0, eps=0.3), 1)
        a = wilson_sample(g, 0.2, 5).nodes
        b = wilson_sample(g, 0.2, 5).nodes
        np.testing.assert_array_equal(a, b)


class TestExpectedSampleSize:
    def test_k2_hand_value(self, k2):
        basis = eigendecompose(laplacian(k2))
        assert expected_sample_size(basis, 2.0) == pytest.approx(1.5, abs=1e-12)

    def test_edgeless_is_n(self, edgeless5):
        basis = eigendecompose(laplacian(edgeless5))
        assert expected_sample_size(basis, 0.01) == pytest.approx(5.0, abs=1e-12)

    def test_saturates_to_n(self, triangle):
        basis = eigendecompose(laplacian(triangle))
        assert expected_sample_size(basis, 1e12) == pytest.approx(3.0, rel=1e-9)


class TestMatchesKernel:
    def test_marginals_weighted_graph(self):
        # weighted edges exercise the CDF-bisection transition path
        rng = np.random.default_rng(3)
        edges = [
            (i, j, float(rng.uniform(0.2, 3.0)))
            for i in range(15)
            for j in range(i + 1, 15)
            if rng.random() < 0.35
        ]
        g = Graph(15, edges)
        diag = wilson_kernel_explicit(eigendecompose(laplacian(g)), 1.0).diagonal()
        runs = 10_000
        counts = np.zeros(15)
        for _ in range(runs):
            counts[wilson_sample(g, 1.0, rng).nodes] += 1
        freq = counts / runs
        se = np.sqrt(diag * (1 - diag) / runs)
        assert np.all(np.abs(freq - diag) <= 4 * np.maximum(se, 1e-4))

    def test_size_law(self):
        rng = np.random.default_rng(4)
        g = sbm_generate(SbmParams(n=30, k_comm=2, c=6.0, eps=0.2), 2)
        kernel = wilson_kernel_explicit(eigendecompose(laplacian(g)), 0.5)
        mu = kernel.eigenvalues
        mean, var = mu.sum(), (mu * (1 - mu)).sum()
        runs = 10_000
        sizes = np.array([len(wilson_sample(g, 0.5, rng)) for _ in range(runs)])
        assert abs(sizes.mean() - mean) <= 4 * np.sqrt(var / runs)
        kappa4 = np.sum(mu * (1 - mu) * (1 - 6 * mu * (1 - mu)))
        var_of_var = (kappa4 + 2 * var**2) / runs
        assert abs(sizes.var(ddof=1) - var) <= 4 * np.sqrt(var_of_var)

    def test_joint_law_small_graph(self):
        rng = np.random.default_rng(6)
        g = Graph(5, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (0, 4, 1.0)])
        kernel = wilson_kernel_explicit(eigendecompose(laplacian(g)), 0.8)
        law = dpp_exact_law(kernel.matrix())
        runs = 30_000
        samples = [wilson_sample(g, 0.8, rng).nodes for _ in range(runs)]
        assert empirical_tv(samples, law) <= 0.04

    def test_scan_order_independence(self):
        rng = np.random.default_rng(7)
        g = sbm_generate(SbmParams(n=20, k_comm=2, c=5.0, eps=0.3), 5)
        runs = 8000
        freq = {}
        for order in ("default", "random", "reversed"):
            counts = np.zeros(20)
            for _ in range(runs):
                kw = {}
                if order == "random":
                    kw["order"] = "random"
                elif order == "reversed":
                    kw["order"] = range(19, -1, -1)
                counts[wilson_sample(g, 0.7, rng, **kw).nodes] += 1
            freq[order] = counts / runs
        se = np.sqrt(0.25 / runs)  # conservative per-node bound
        for order in ("random", "reversed"):
            assert np.all(np.abs(freq[order] - freq["default"]) <= 4 * (2 * se))


class TestTuneQ:
    def test_k2_small_target(self, k2):
        q = tune_q(k2, 1, 0, runs_per_probe=200, tol=0.1)
        rng = np.random.default_rng(1)
        mean = np.mean([len(wilson_sample(k2, q, rng)) for _ in range(2000)])
        assert 1.0 <= mean <= 1.0 + 0.15

    def test_target_n(self, triangle):
        # fresh-run mean gets probe noise on top of the tuner band
        q = tune_q(triangle, 3, 0, runs_per_probe=100, tol=0.05)
        rng = np.random.default_rng(2)
        mean = np.mean([len(wilson_sample(triangle, q, rng)) for _ in range(1000)])
        assert mean >= 3.0 * (1 - 0.1)

    def test_sbm_fresh_run_verification(self):
        g = sbm_generate(SbmParams(n=100, k_comm=2, c=16.0, eps=0.12), 6)
        q = tune_q(g, 2, 3, runs_per_probe=400, tol=0.1)
        rng = np.random.default_rng(4)
        mean = np.mean([len(wilson_sample(g, q, rng)) for _ in range(1000)])
        assert 2.0 * (1 - 0.2) <= mean <= 2.0 * (1 + 0.2)

    def test_unreachable_target_raises(self, edgeless5):
        # every run returns all 5 nodes, so a mean of 1 is unreachable
        with pytest.raises(NoConvergence):
            tune_q(edgeless5, 1, 0, runs_per_probe=10, tol=0.1, max_probes=10)

    def test_rejects_bad_target(self, k2):
        with pytest.raises(InvalidParams):
            tune_q(k2, 3, 0)
