import json

import numpy as np
import pytest

from stochtune import functional
from stochtune import (
    ControlPolicy,
    LfifCoefficients,
    Sense,
    dominance_audit,
    evaluate_index,
    optimize,
    optimize_lfif,
    sample_simplex,
)
from stochtune.errors import EmptyActionSet, UnstableModel

from conftest import (
    make_continuous_model,
    make_model,
    make_policy,
    reference_continuous_model,
)
from test_functional import constant_rows_model, scaled_reward, scaled_time, unstable_model


class TestOptimize:
    def test_reference_model_single_candidate(self):
        result = optimize(reference_continuous_model())
        assert result.best_point == (0, 0)
        assert result.best_labels == (2, 2)
        assert result.best_value == pytest.approx(1.8, rel=1e-12)
        assert result.ties == ((0, 0),)
        assert np.array_equal(result.policy.alpha0, [1.0])
        assert np.array_equal(result.policy.alpha1, [1.0])

    def test_constant_surface_ties_everywhere(self):
        model = constant_rows_model(3)
        result = optimize(model)
        assert result.best_point == (0, 0)
        assert len(result.ties) == 9
        assert result.ties[0] == (0, 0)
        assert result.ties == tuple(sorted(result.ties))

    def test_matches_exhaustive_degenerate_scan(self):
        rng = np.random.default_rng(51)
        for _ in range(10):
            model = make_model(rng, int(rng.integers(1, 7)))
            n = model.n_internal
            grid = np.empty((n, n))
            for l0 in range(n):
                for l1 in range(n):
                    grid[l0, l1] = evaluate_index(
                        model, ControlPolicy.degenerate(n, l0, l1)
                    ).value
            for sense, extreme in ((Sense.MAXIMIZE, grid.max()), (Sense.MINIMIZE, grid.min())):
                result = optimize(model, sense)
                assert abs(result.best_value - extreme) <= 1e-12 * max(1.0, abs(extreme))
                via_policy = evaluate_index(model, result.policy).value
                assert abs(via_policy - result.best_value) <= 1e-12 * max(
                    1.0, abs(result.best_value)
                )

    def test_policy_is_degenerate_at_best_point(self):
        rng = np.random.default_rng(52)
        model = make_continuous_model(rng, 5)
        result = optimize(model)
        l0, l1 = result.best_point
        assert result.policy.alpha0[l0] == 1.0
        assert result.policy.alpha1[l1] == 1.0
        assert result.policy.alpha0.sum() == 1.0
        assert result.policy.alpha1.sum() == 1.0

    def test_unstable_model_rejected(self):
        with pytest.raises(UnstableModel):
            optimize(unstable_model())
        result = optimize(unstable_model(), allow_unstable=True)
        assert result.best_point == (0, 0)

    def test_deterministic_serialized_results(self):
        rng = np.random.default_rng(53)
        model = make_continuous_model(rng, 6)
        first = json.dumps(optimize(model).to_dict(), sort_keys=True)
        second = json.dumps(optimize(model).to_dict(), sort_keys=True)
        assert first == second

    def test_argmax_invariant_under_scalings(self):
        rng = np.random.default_rng(54)
        for _ in range(5):
            model = make_continuous_model(rng, int(rng.integers(2, 7)))
            base = optimize(model)
            for s in (0.5, 2.0, 10.0):
                assert optimize(scaled_time(model, s)).best_point == base.best_point
                assert optimize(scaled_reward(model, s)).best_point == base.best_point


class TestOptimizeLfif:
    def test_single_factor(self):
        coeffs = LfifCoefficients(a=np.array([2.0, 4.0]), b=np.array([1.0, 1.0]))
        result = optimize_lfif(coeffs, Sense.MAXIMIZE)
        assert result.best_point == (1,)
        assert result.best_value == 4.0
        assert result.policy is None

    def test_flat_three_factor_grid_all_tied(self):
        shape = (2, 2, 2)
        coeffs = LfifCoefficients(a=np.ones(shape), b=np.ones(shape))
        result = optimize_lfif(coeffs, Sense.MAXIMIZE)
        assert result.best_point == (0, 0, 0)
        assert result.best_value == 1.0
        assert len(result.ties) == 8

    def test_matches_double_loop_scan(self):
        rng = np.random.default_rng(55)
        for _ in range(10):
            n0, n1 = rng.integers(1, 7, size=2)
            a = rng.uniform(-3, 3, size=(n0, n1))
            b = rng.uniform(0.5, 2.0, size=(n0, n1))
            coeffs = LfifCoefficients(a=a, b=b)
            best = -np.inf
            best_point = None
            for i in range(n0):
                for j in range(n1):
                    value = a[i, j] / b[i, j]
                    if value > best:
                        best = value
                        best_point = (i, j)
            result = optimize_lfif(coeffs, Sense.MAXIMIZE)
            assert result.best_point == best_point
            assert result.best_value == pytest.approx(best, rel=1e-12)

    def test_minimize_sense(self):
        coeffs = LfifCoefficients(a=np.array([[2.0, -4.0]]), b=np.array([[1.0, 2.0]]))
        result = optimize_lfif(coeffs, Sense.MINIMIZE)
        assert result.best_point == (0, 1)
        assert result.best_value == -2.0

    def test_sense_accepts_raw_string(self):
        coeffs = LfifCoefficients(a=np.array([1.0, 2.0]), b=np.array([1.0, 1.0]))
        assert optimize_lfif(coeffs, "min").best_point == (0,)

    def test_empty_grid_rejected(self):
        coeffs = LfifCoefficients(a=np.zeros(0), b=np.zeros(0))
        with pytest.raises(EmptyActionSet):
            optimize_lfif(coeffs)


class TestSampleSimplex:
    def test_valid_distribution(self):
        rng = np.random.default_rng(56)
        for size in (1, 2, 5, 17):
            vec = sample_simplex(rng, size)
            assert vec.shape == (size,)
            assert np.all(vec >= 0.0)
            assert vec.sum() == pytest.approx(1.0, abs=1e-12)

    def test_single_point_simplex_is_exact(self):
        rng = np.random.default_rng(57)
        assert np.array_equal(sample_simplex(rng, 1), [1.0])


class TestDominanceAudit:
    def test_single_state_model_all_samples_equal(self):
        report = dominance_audit(reference_continuous_model(), 100, seed=9)
        assert report.sampled_maximum == pytest.approx(1.8, rel=1e-12)
        assert report.sampled_minimum == pytest.approx(1.8, rel=1e-12)
        assert report.n_above_maximum == 0
        assert report.n_below_minimum == 0

    def test_random_model_no_violations(self):
        rng = np.random.default_rng(58)
        model = make_continuous_model(rng, 4)
        report = dominance_audit(model, 1000, seed=17)
        assert report.n_samples == 1000
        assert report.n_above_maximum == 0
        assert report.n_below_minimum == 0
        assert report.best_minimum - 1e-12 <= report.sampled_minimum
        assert report.sampled_maximum <= report.best_maximum + 1e-12

    def test_empty_audit(self):
        report = dominance_audit(reference_continuous_model(), 0, seed=1)
        assert report.n_samples == 0
        assert report.n_above_maximum == 0
        assert report.n_below_minimum == 0
        assert np.isnan(report.sampled_maximum)

    def test_optimality_certificate_brackets_samples(self):
        rng = np.random.default_rng(59)
        model = make_model(rng, 5)
        coeffs = functional.coefficients(model)
        ratio = coeffs.a / coeffs.b
        for _ in range(50):
            value = evaluate_index(model, make_policy(rng, 5)).value
            assert ratio.min() - 1e-12 <= value <= ratio.max() + 1e-12
