import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import dais
from dais.gaussian import derive_seed, standard_normal_draws

from conftest import central_diff_grad, rel_err


def random_spd(rng, d):
    a = rng.standard_normal((d, d))
    return a @ a.T + d * np.eye(d)


def test_identity_cholesky():
    p = dais.gaussian_new([0, 0], np.eye(2))
    np.testing.assert_array_equal(p.chol, np.eye(2))


def test_correlated_covariance_is_pd():
    cov = np.full((10, 10), 0.9) + 0.1 * np.eye(10)
    p = dais.gaussian_new(np.ones(10), cov)
    assert np.all(np.diag(p.chol) > 0)
    assert np.linalg.norm(p.chol @ p.chol.T - cov) / np.linalg.norm(cov) < 1e-10


def test_indefinite_covariance_rejected():
    with pytest.raises(dais.CholeskyFailure):
        dais.gaussian_new([0, 0], [[1, 2], [2, 1]])


@pytest.mark.parametrize("mean, cov", [([0, 0], np.eye(3)), ([0, 0, 0], np.eye(2))])
def test_dimension_mismatch(mean, cov):
    with pytest.raises(dais.DimensionMismatch):
        dais.gaussian_new(mean, cov)


def test_asymmetric_covariance_rejected():
    with pytest.raises(ValueError):
        dais.gaussian_new([0, 0], [[1, 0.1], [0.0, 1]])


def test_params_are_read_only():
    p = dais.standard_normal(2)
    with pytest.raises(ValueError):
        p.mean[0] = 1.0


def test_sample_identity_transform_is_raw_draws():
    x = dais.gaussian_sample(dais.standard_normal(3), 50, seed=11)
    np.testing.assert_array_equal(x, standard_normal_draws(11, 50, 3))


def test_sample_determinism_and_seed_dependence():
    p = dais.gaussian_new([1.0, -2.0], [[2.0, 0.3], [0.3, 0.5]])
    a = dais.gaussian_sample(p, 1000, seed=5)
    np.testing.assert_array_equal(a, dais.gaussian_sample(p, 1000, seed=5))
    assert not np.array_equal(a, dais.gaussian_sample(p, 1000, seed=6))


def test_sample_independent_of_threads():
    p = dais.gaussian_new(np.zeros(3), np.diag([1.0, 2.0, 3.0]))
    a = dais.gaussian_sample(p, 20_000, seed=3, n_threads=1)
    b = dais.gaussian_sample(p, 20_000, seed=3, n_threads=4)
    np.testing.assert_array_equal(a, b)


@given(start=st.integers(0, 500), count=st.integers(1, 40), d=st.integers(1, 7))
@settings(max_examples=50, deadline=None)
def test_draws_are_counter_based(start, count, d):
    whole = standard_normal_draws(9, start + count, d)
    np.testing.assert_array_equal(standard_normal_draws(9, count, d, start=start), whole[start:])


def test_derive_seed_is_stable_and_distinct():
    assert derive_seed(0, 1) == derive_seed(0, 1)
    assert len({derive_seed(0, t) for t in range(100)}) == 100


def test_sample_mean_clt():
    x = dais.gaussian_sample(dais.standard_normal(1), 10_000, seed=0)
    assert abs(x.mean()) < 4 / np.sqrt(10_000)


def test_sample_covariance_converges():
    rng = np.random.default_rng(1)
    cov = random_spd(rng, 3)
    p = dais.gaussian_new(rng.standard_normal(3), cov)
    x = dais.gaussian_sample(p, 100_000, seed=2)
    emp = np.cov(x, rowvar=False)
    assert np.linalg.norm(emp - cov) / np.linalg.norm(cov) < 0.05


def test_log_density_standard_normal_mode():
    p = dais.standard_normal(1)
    assert dais.gaussian_log_density(p, [0.0]) == pytest.approx(-0.9189385332046727, abs=1e-15)


def test_log_density_identity_2d():
    p = dais.standard_normal(2)
    assert dais.gaussian_log_density(p, [1.0, 1.0]) == pytest.approx(-1 - np.log(2 * np.pi), abs=1e-14)


def test_log_density_matches_dense_inverse():
    p = dais.gaussian_new([0, 0], [[1, 0.9], [0.9, 1]])
    # dense-inverse evaluation, computed independently
    assert dais.gaussian_log_density(p, [1.0, 0.0]) == pytest.approx(-3.6390904103669417, rel=1e-13)


def test_log_density_batch_matches_pointwise():
    rng = np.random.default_rng(0)
    p = dais.gaussian_new(rng.standard_normal(4), random_spd(rng, 4))
    x = rng.standard_normal((5, 4))
    batch = dais.gaussian_log_density(p, x)
    assert np.allclose(batch, [dais.gaussian_log_density(p, xi) for xi in x], rtol=0, atol=1e-12)


def test_log_density_dimension_mismatch():
    with pytest.raises(dais.DimensionMismatch):
        dais.gaussian_log_density(dais.standard_normal(2), [1.0, 2.0, 3.0])


def test_grad_at_mode_and_scalar_case():
    p = dais.gaussian_new([1.0, 2.0], [[2.0, 0.5], [0.5, 1.0]])
    np.testing.assert_allclose(dais.gaussian_grad_log_density(p, [1.0, 2.0]), 0.0, atol=1e-15)
    q = dais.gaussian_new([0.0], [[4.0]])
    assert dais.gaussian_grad_log_density(q, [2.0])[0] == pytest.approx(-0.5)


def test_grad_matches_finite_differences_d5():
    rng = np.random.default_rng(5)
    p = dais.gaussian_new(rng.standard_normal(5), random_spd(rng, 5))
    x = rng.standard_normal(5)
    fd = central_diff_grad(lambda y: dais.gaussian_log_density(p, y), x)
    assert rel_err(dais.gaussian_grad_log_density(p, x), fd) < 1e-6


def test_grad_finite_differences_random_points():
    rng = np.random.default_rng(6)
    for _ in range(100):
        d = int(rng.integers(1, 21))
        p = dais.gaussian_new(rng.standard_normal(d), random_spd(rng, d))
        x = p.mean + rng.standard_normal(d)
        fd = central_diff_grad(lambda y: dais.gaussian_log_density(p, y), x, h=1e-5)
        assert rel_err(dais.gaussian_grad_log_density(p, x), fd) < 1e-5


def test_oracle_endpoints(example_pair):
    q, target = example_pair
    at_one = dais.damped_gaussian_oracle(q, target.params, 1.0)
    np.testing.assert_allclose(at_one.mean, target.params.mean, atol=1e-12)
    np.testing.assert_allclose(at_one.covariance, target.params.covariance, atol=1e-12)
    near_zero = dais.damped_gaussian_oracle(q, target.params, 1e-12)
    np.testing.assert_allclose(near_zero.mean, q.mean, atol=1e-9)
    np.testing.assert_allclose(near_zero.covariance, q.covariance, atol=1e-9)


def test_oracle_half_damping_frozen_values(example_pair):
    # dense precision blend computed by a standalone script
    q, target = example_pair
    out = dais.damped_gaussian_oracle(q, target.params, 0.5)
    np.testing.assert_allclose(out.mean, 0.09900990099009847, rtol=1e-12)
    expected = np.full((10, 10), 0.16201620162016214)
    np.fill_diagonal(expected, 0.3438343834383439)
    np.testing.assert_allclose(out.covariance, expected, rtol=1e-12)


def test_oracle_continuous_in_gamma():
    rng = np.random.default_rng(7)
    for _ in range(20):
        d = int(rng.integers(1, 8))
        a = dais.gaussian_new(rng.standard_normal(d), random_spd(rng, d))
        b = dais.gaussian_new(rng.standard_normal(d), random_spd(rng, d))
        g = rng.uniform(0.01, 0.99)
        c1 = dais.damped_gaussian_oracle(a, b, g).covariance
        c2 = dais.damped_gaussian_oracle(a, b, g + 1e-6).covariance
        assert np.linalg.norm(c1 - c2) < 1e-4 * np.linalg.norm(b.covariance)


def test_oracle_rejects_bad_gamma(example_pair):
    q, target = example_pair
    with pytest.raises(ValueError):
        dais.damped_gaussian_oracle(q, target.params, 0.0)
