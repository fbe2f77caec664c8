import numpy as np
import pytest

from dais.experiments import (
    RMSE_COLUMNS,
    control_variate_rmse,
    default_gamma_grid,
    loglog_slopes,
    monitor_run,
    monitoring_target,
)


def test_default_grid():
    g = default_gamma_grid()
    assert g.shape == (7,)
    np.testing.assert_allclose(g[[0, -1]], [1e-3, 1.0])


def test_rmse_table_shape_and_reproducibility():
    a = control_variate_rmse(d=3, s_count=50, replications=4, gammas=[0.01, 0.1], seed=2)
    b = control_variate_rmse(d=3, s_count=50, replications=4, gammas=[0.01, 0.1], seed=2)
    assert a.shape == (2, len(RMSE_COLUMNS))
    np.testing.assert_array_equal(a, b)
    assert np.all(a[:, 1:] > 0)


def test_slopes_from_exact_power_laws():
    g = np.logspace(-3, 0, 7)
    table = np.column_stack([g, 2 * g, np.ones_like(g), 3 * g ** 0.5, g ** 2])
    s = loglog_slopes(table)
    assert s["rmse_mean_stein"] == pytest.approx(1.0)
    assert s["rmse_mean_naive"] == pytest.approx(0.0, abs=1e-12)
    assert s["rmse_cov_stein"] == pytest.approx(0.5)
    assert s["rmse_cov_naive"] == pytest.approx(2.0)
    assert s["gamma_range"] == pytest.approx([1e-3, 0.1])


def test_slopes_fallback_and_degenerate():
    table = np.array([[0.5, 1, 1, 1, 1], [1.0, 2, 2, 2, 2]], dtype=float)
    assert loglog_slopes(table)["rmse_mean_stein"] == pytest.approx(1.0)
    assert loglog_slopes(table[:1]) is None


def test_monitoring_targets():
    assert monitoring_target("sine2d")[1] == 0.1
    t, c = monitoring_target("corr-gauss-100")
    assert (t.dim, c) == (100, 0.3)
    with pytest.raises(ValueError):
        monitoring_target("banana")


def test_monitor_runs_exact_iteration_count():
    rows = monitor_run("sine2d", s_count=500, iters=4, n_ess=50)
    assert rows.shape == (4, 3)
    np.testing.assert_array_equal(rows[:, 0], [1, 2, 3, 4])
