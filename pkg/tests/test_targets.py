import numpy as np
import pytest

import dais
from dais.targets import FunctionTarget, OffsetTarget, log_sigmoid

from conftest import central_diff_grad, central_diff_jac, rel_err


def all_targets():
    data, _ = dais.synthetic_logistic_data(50, 3, seed=4)
    return {
        "banana": dais.banana_target(),
        "mixture": dais.mixture_target(),
        "sine2d": dais.sine_2d_target(0.3),
        "corr-gauss": dais.correlated_gaussian_target(4),
        "logistic": dais.logistic_target(data),
    }


@pytest.mark.parametrize("name", sorted(all_targets()))
def test_grad_and_hessian_match_finite_differences(name):
    target = all_targets()[name]
    rng = np.random.default_rng(0)
    for _ in range(10):
        x = 0.5 * rng.standard_normal(target.dim)
        fd_g = central_diff_grad(target.log_density, x, h=1e-6)
        assert rel_err(target.grad_log_density(x), fd_g) < 1e-5
        fd_h = central_diff_jac(target.grad_log_density, x, h=1e-6)
        h = target.hessian_log_density(x)
        assert rel_err(h, fd_h) < 1e-5
        np.testing.assert_allclose(h, h.T, atol=1e-12)


@pytest.mark.parametrize("name", sorted(all_targets()))
def test_batch_evaluation_matches_pointwise(name):
    target = all_targets()[name]
    x = np.random.default_rng(1).standard_normal((6, target.dim))
    np.testing.assert_allclose(target.log_density(x), [target.log_density(xi) for xi in x], rtol=1e-13)
    np.testing.assert_allclose(target.grad_log_density(x), [target.grad_log_density(xi) for xi in x], rtol=1e-13)
    assert target.hessian_log_density(x).shape == (6, target.dim, target.dim)


def test_dimension_mismatch():
    with pytest.raises(dais.DimensionMismatch):
        dais.banana_target().log_density(np.zeros(3))


def test_banana_frozen_difference():
    t = dais.banana_target()
    assert t.log_density([0.0, -1.0]) - t.log_density([1.0, 0.0]) == pytest.approx(3.68421052631579, rel=1e-12)


def test_banana_exact_moments_by_monte_carlo():
    t = dais.banana_target()
    mean, cov = t.exact_moments()
    rng = np.random.default_rng(3)
    y = rng.multivariate_normal([0, 0], [[1, 0.9], [0.9, 1]], size=400_000)
    x = np.column_stack([y[:, 0], y[:, 1] - y[:, 0] ** 2 - 1])
    np.testing.assert_allclose(x.mean(0), mean, atol=0.02)
    np.testing.assert_allclose(np.cov(x, rowvar=False), cov, atol=0.05)


def test_mixture_exact_moments():
    mean, cov = dais.mixture_target().exact_moments()
    np.testing.assert_allclose(mean, [-1.16, -1.16], atol=1e-12)
    np.testing.assert_allclose(cov, [[2.6464, 1.4664], [1.4664, 2.6464]], atol=1e-12)


def test_mixture_log_density_is_normalized():
    t = dais.mixture_target()
    g = np.linspace(-9, 7, 401)
    xx, yy = np.meshgrid(g, g)
    dens = np.exp(t.log_density(np.column_stack([xx.ravel(), yy.ravel()])))
    assert dens.sum() * (g[1] - g[0]) ** 2 == pytest.approx(1.0, abs=1e-4)


def test_sine2d_ridge_and_normalizing_constant():
    t = dais.sine_2d_target(0.1)
    on = t.log_density([0.3, 1.0 + np.sin(0.6)])
    off = t.log_density([0.3, 1.5 + np.sin(0.6)])
    assert on - off == pytest.approx(0.5 * 25.0 + 0.5 * (1.5 + np.sin(0.6)) ** 2 - 0.5 * (1.0 + np.sin(0.6)) ** 2)
    assert t.log_density([0.0, 1.0]) == pytest.approx(-0.5 - np.log(2 * np.pi))
    with pytest.raises(ValueError):
        dais.sine_2d_target(0.0)


def test_log_sigmoid_stable_tails():
    z = np.array([-800.0, -30.0, 0.0, 30.0, 800.0])
    out = log_sigmoid(z)
    assert np.all(np.isfinite(out))
    assert out[0] == pytest.approx(-800.0)
    assert out[2] == pytest.approx(-np.log(2.0))
    assert out[4] == 0.0


def test_logistic_log_density_by_hand():
    data = dais.LogisticRegressionData([1.0, -1.0], [[1.0, 2.0], [0.5, -1.0]], prior_variance=10.0)
    t = dais.logistic_target(data)
    x = np.array([0.3, -0.2])
    z = data.labels * (data.features @ x)
    expected = np.sum(-np.log1p(np.exp(-z))) - 0.5 * x @ x / 10.0
    assert t.log_density(x) == pytest.approx(expected, rel=1e-14)


def test_gaussian_target_analytic_expectations_match_mc():
    t = dais.correlated_gaussian_target(3)
    q = dais.gaussian_new([0.2, -0.1, 0.4], np.diag([0.5, 1.0, 2.0]))
    x = dais.gaussian_sample(q, 200_000, seed=1)
    np.testing.assert_allclose(t.grad_log_density(x).mean(0), t.expected_grad(q), atol=0.05)
    np.testing.assert_allclose(t.hessian_log_density(x[:5]).mean(0), t.expected_hessian(q))


def test_function_and_offset_targets():
    f = FunctionTarget(1, lambda x: -0.5 * x[:, 0] ** 2, lambda x: -x)
    assert not f.has_hessian
    with pytest.raises(dais.HessianUnavailable):
        f.hessian_log_density([0.0])
    shifted = OffsetTarget(dais.banana_target(), 7.0)
    x = np.array([0.4, -0.3])
    assert shifted.log_density(x) == pytest.approx(dais.banana_target().log_density(x) + 7.0)
    np.testing.assert_array_equal(shifted.grad_log_density(x), dais.banana_target().grad_log_density(x))


def test_laplace_on_gaussian_is_exact():
    t = dais.correlated_gaussian_target(5)
    lap = dais.laplace_init(t, np.zeros(5))
    np.testing.assert_allclose(lap.mean, t.params.mean, atol=1e-10)
    np.testing.assert_allclose(lap.covariance, t.params.covariance, atol=1e-10)


def test_laplace_on_logistic_reaches_stationary_point():
    data, _ = dais.synthetic_logistic_data(200, 5, seed=1)
    t = dais.logistic_target(data)
    lap = dais.laplace_init(t, np.zeros(5))
    assert np.max(np.abs(t.grad_log_density(lap.mean))) < 1e-8
    np.testing.assert_allclose(np.linalg.inv(lap.covariance), -t.hessian_log_density(lap.mean), rtol=1e-8)


def test_laplace_errors():
    f = FunctionTarget(1, lambda x: -0.5 * x[:, 0] ** 2, lambda x: -x)
    with pytest.raises(dais.HessianUnavailable):
        dais.laplace_init(f, [0.0])
    data, _ = dais.synthetic_logistic_data(200, 5, seed=1)
    with pytest.raises(dais.NoConvergence):
        dais.laplace_init(dais.logistic_target(data), np.zeros(5), max_newton_iters=1)
