"""Tests for the synthetic metapath CSBM lab."""

import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from relatron.csbm import (
    CROSSOVER_PRESET,
    REGIMES,
    CsbmInstance,
    CsbmSpec,
    MetapathSpec,
    average_vs_absolute_homophily,
    crossover_experiment,
    detect_crossover,
    estimate_gamma,
    gamma_alpha,
    gating_experiment,
    linear_scores,
    map_scores,
    misclass_rate,
    phi_max,
    predict_labels,
    rho_gate,
    rho_lin,
    sample,
    snr,
)


def small_spec(*metapaths):
    return CsbmSpec(n=200, prior=0.5, delta=2.0, metapaths=metapaths or (MetapathSpec(gamma=1.0, degree=5),))


def pair_instance(prior=0.75):
    """Two connected nodes with scores 0.5 and -2."""
    spec = CsbmSpec(n=2, prior=prior, metapaths=(MetapathSpec(p=0.5, q=0.5),))
    adjacency = sp.csr_array(np.array([[0.0, 1.0], [1.0, 0.0]]))
    return CsbmInstance(spec, np.array([1, -1]), np.array([0.5, -2.0]), [adjacency])


def block_instance(edges):
    labels = np.array([1, 1, -1, -1])
    matrix = np.zeros((4, 4))
    for i, j in edges:
        matrix[i, j] = matrix[j, i] = 1.0
    return CsbmInstance(small_spec(), labels, np.zeros(4), [sp.csr_array(matrix)])


class TestSpec:
    """Test model parameters."""

    def test_metapath_form(self):
        with pytest.raises(ValidationError):
            MetapathSpec(p=0.1, q=0.2, gamma=1.0, degree=3)
        with pytest.raises(ValidationError):
            MetapathSpec(p=0.1)

    def test_degree_conversion(self):
        spec = CsbmSpec(n=2000, metapaths=(MetapathSpec(gamma=0.0, degree=8), MetapathSpec(gamma=1.2, degree=8)))
        np.testing.assert_allclose(spec.degrees(), [8.0, 8.0])
        np.testing.assert_allclose(spec.gammas(), [0.0, 1.2])

    def test_explicit_gammas(self):
        spec = CsbmSpec(metapaths=(MetapathSpec(p=0.75, q=0.25), MetapathSpec(p=0.1, q=0.0)))
        assert spec.gammas()[0] == pytest.approx(math.log(3))
        assert spec.gammas()[1] == math.inf

    def test_infeasible_degree(self):
        with pytest.raises(ValueError):
            CsbmSpec(n=3, metapaths=(MetapathSpec(gamma=5.0, degree=100),)).probabilities()

    def test_average_vs_absolute(self):
        summary = average_vs_absolute_homophily(REGIMES["sign_mixed"])
        assert summary["gamma_avg"] == pytest.approx(0.0, abs=1e-9)
        assert summary["gamma_abs"] == pytest.approx(1.2)


class TestSample:
    """Test instance sampling."""

    def test_shapes(self):
        instance = sample(small_spec())
        assert instance.n == 200
        assert set(np.unique(instance.labels)) <= {-1, 1}
        adjacency = instance.adjacency[0]
        assert (adjacency != adjacency.T).nnz == 0
        assert adjacency.diagonal().sum() == 0

    def test_deterministic(self):
        one, two = sample(small_spec(), 3), sample(small_spec(), 3)
        np.testing.assert_array_equal(one.scores, two.scores)
        assert (one.adjacency[0] != two.adjacency[0]).nnz == 0

    def test_appending_metapath_keeps_draws(self):
        spec = small_spec()
        base = sample(spec, 1)
        extended = sample(spec.with_metapaths(MetapathSpec(gamma=-1.0, degree=3)), 1)
        np.testing.assert_array_equal(base.labels, extended.labels)
        assert (base.adjacency[0] != extended.adjacency[0]).nnz == 0
        assert len(extended.adjacency) == 2

    def test_empty_metapath(self):
        instance = sample(small_spec(MetapathSpec(p=0.0, q=0.0)))
        assert instance.adjacency[0].nnz == 0


class TestScoring:
    """Test MAP and linear aggregation."""

    def test_phi_max(self):
        np.testing.assert_allclose(phi_max(np.array([-3.0, 0.5, 3.0]), 1.0), [-1.0, 0.5, 1.0])
        np.testing.assert_allclose(phi_max(np.array([-3.0, 0.5, 3.0]), -1.0), [1.0, -0.5, -1.0])
        np.testing.assert_array_equal(phi_max(np.array([2.0]), 0.0), [0.0])

    @given(st.floats(-50, 50), st.floats(-10, 10).filter(lambda g: g != 0))
    def test_phi_max_bounds(self, s, gamma):
        value = float(phi_max(np.array([s]), gamma)[0])
        assert abs(value) <= abs(gamma)
        assert phi_max(np.array([s]), -gamma)[0] == -value
        if abs(s) <= abs(gamma):
            assert value == pytest.approx(s * math.copysign(1.0, gamma))

    def test_map_clips_neighbor_scores(self):
        z = map_scores(pair_instance(), [1.0], 0.75)
        np.testing.assert_allclose(z, [math.log(3) - 0.5, math.log(3) - 1.5])

    def test_wide_gate_matches_linear(self):
        instance = pair_instance()
        np.testing.assert_allclose(map_scores(instance, [5.0], 0.75), linear_scores(instance, 0.75))

    def test_gate_count(self):
        with pytest.raises(ValueError):
            map_scores(pair_instance(), [1.0, 2.0], 0.75)

    def test_prior_bounds(self):
        with pytest.raises(ValueError):
            linear_scores(pair_instance(), 1.0)

    def test_labels(self):
        np.testing.assert_array_equal(predict_labels([0.0, -0.1, 2.0]), [1, -1, 1])
        assert misclass_rate([1.0, 1.0], [1, -1]) == 0.5


class TestEstimate:
    """Test gate estimation from revealed labels."""

    def test_homophilous_blocks(self):
        gammas = estimate_gamma(block_instance([(0, 1), (2, 3)]), np.ones(4, dtype=bool))
        assert gammas[0] == pytest.approx(math.log((3 / 4) / (1 / 6)))

    def test_index_array(self):
        instance = block_instance([(0, 1), (2, 3), (0, 2)])
        np.testing.assert_allclose(estimate_gamma(instance, [0, 1, 2, 3]), estimate_gamma(instance, np.ones(4, bool)))

    def test_no_labeled_edges(self):
        assert estimate_gamma(block_instance([(0, 1)]), [0, 2])[0] == 0.0

    def test_mask_length(self):
        with pytest.raises(ValueError):
            estimate_gamma(block_instance([]), np.ones(3, dtype=bool))


class TestSnr:
    """Test the signal-to-noise proxies."""

    def test_gamma_alpha(self):
        gamma, alpha = gamma_alpha(0.75, 0.25)
        assert gamma == pytest.approx(math.log(3))
        assert alpha == pytest.approx(0.5)
        assert alpha == pytest.approx(math.tanh(gamma / 2))

    def test_gamma_alpha_bounds(self):
        with pytest.raises(ValueError):
            gamma_alpha(1.0, 0.5)

    def test_rho_lin(self):
        assert rho_lin([10], [0.5], 1.0, 1.0) == pytest.approx(2.5)

    def test_rho_gate(self):
        assert rho_gate([10], [0.5], [2.0], [0.5]) == pytest.approx(20.0)
        assert rho_gate([10], [0.5], [0.0], [0.5]) == 0.0

    def test_sign_mixed_cancels_linear_signal(self):
        report = snr(REGIMES["sign_mixed"], mc_samples=2000)
        assert report.rho_lin == pytest.approx(0.0, abs=1e-9)
        assert report.rho_gate > 0.1
        assert len(report.as_dict()["metapaths"]) == 2

    def test_zero_gate_has_no_variance(self):
        report = snr(REGIMES["zero_info"], mc_samples=2000)
        assert report.variances[-1] == 0.0

    def test_mc_samples(self):
        with pytest.raises(ValueError):
            snr(small_spec(), mc_samples=10)


class TestCrossover:
    """Test crossover detection and the sample-size experiment."""

    def test_detect(self):
        assert detect_crossover([10, 30, 100], [0.3, 0.25, 0.1], [0.2] * 3) == 100
        assert detect_crossover([10, 30], [0.1, 0.1], [0.2, 0.2]) is None
        assert detect_crossover([10, 30], [0.3, 0.3], [0.2, 0.2]) is None

    def test_validation(self):
        with pytest.raises(ValueError):
            crossover_experiment(small_spec(), grid=(30, 10))
        with pytest.raises(ValueError):
            crossover_experiment(small_spec(), grid=(10, 150))
        with pytest.raises(ValueError):
            crossover_experiment(small_spec(), test_fraction=1.0)

    def test_small_run(self, tmp_path):
        result = crossover_experiment(small_spec(), grid=(10, 50), seeds=2, threads=2)
        assert result.gated.shape == (2, 2)
        assert len(result.crossovers) == 2
        path = result.save_curves(tmp_path / "curves.csv")
        assert path.read_text().splitlines()[0] == "N,gated_error,linear_error"

    def test_preset_keeps_net_linear_signal(self):
        net = sum(m.degree * math.tanh(m.gamma / 2) for m in CROSSOVER_PRESET.metapaths)
        assert net == pytest.approx(2.25, abs=0.01)
        assert average_vs_absolute_homophily(CROSSOVER_PRESET)["gamma_avg"] > 0

    @pytest.mark.slow
    def test_preset_crosses_over(self):
        result = crossover_experiment(CROSSOVER_PRESET, seeds=10)
        assert result.crossover is not None
        assert result.oracle.mean() < result.mean_linear


class TestGating:
    """Test the gating-advantage regimes."""

    def test_needs_ten_seeds(self):
        with pytest.raises(ValueError):
            gating_experiment(small_spec(), seeds=5)

    @pytest.mark.slow
    def test_sign_mixed_favors_gating(self):
        result = gating_experiment(REGIMES["sign_mixed"], seeds=10)
        assert result.gated.mean() < result.linear.mean() - 0.05

    @pytest.mark.slow
    def test_strong_homophily_is_a_wash(self):
        assert abs(gating_experiment(REGIMES["strong_homophily"], seeds=10).advantage) < 0.02

    @pytest.mark.slow
    def test_zero_gate_leaves_gated_error_unchanged(self):
        base = gating_experiment(REGIMES["zero_info_base"], seeds=10)
        extended = gating_experiment(REGIMES["zero_info"], seeds=10)
        np.testing.assert_array_equal(base.gated, extended.gated)
