"""Reproducible experiment drivers used by the command-line harness."""

import numpy as np

from .core import DaisConfig, run_dais
from .gaussian import damped_gaussian_oracle, derive_seed, standard_normal
from .importance import build_batch, naive_moment_estimates, normalized_weights, stein_moment_estimates
from .targets import correlated_gaussian_target, sine_2d_target

RMSE_COLUMNS = ("gamma", "rmse_mean_stein", "rmse_mean_naive", "rmse_cov_stein", "rmse_cov_naive")


def default_gamma_grid(n_points=7, low_exp=-3.0, high_exp=0.0):
    return np.logspace(low_exp, high_exp, n_points)


def control_variate_rmse(d=10, s_count=100, replications=100, gammas=None, seed=0, n_threads=None):
    """RMSE of Stein and standard SNIS estimates of damped-target moments.

    Proposal ``N(0, I_d)``, target ``N((1,...,1), 0.9 + 0.1 I)``. For each
    replication one batch is drawn and reused across the ``gammas`` grid.
    Mean errors use the Euclidean norm and covariance errors the Frobenius
    norm, both against the closed-form damped Gaussian.

    Returns an array with one row per gamma and columns ``RMSE_COLUMNS``.
    """
    gammas = default_gamma_grid() if gammas is None else np.asarray(gammas, dtype=np.float64)
    target = correlated_gaussian_target(d)
    proposal = standard_normal(d)
    oracles = [damped_gaussian_oracle(proposal, target.params, g) for g in gammas]
    sq = np.zeros((len(gammas), 4))
    for r in range(replications):
        batch = build_batch(proposal, target, s_count, derive_seed(seed, r), n_threads)
        for k, (gamma, exact) in enumerate(zip(gammas, oracles)):
            w = normalized_weights(batch.phi, gamma)
            g_mu, g_gamma = stein_moment_estimates(batch, proposal, w)
            mean_naive, cov_naive = naive_moment_estimates(batch, w)
            sq[k] += [
                np.sum((proposal.mean + gamma * g_mu - exact.mean) ** 2),
                np.sum((mean_naive - exact.mean) ** 2),
                np.sum((proposal.covariance + gamma * g_gamma - exact.covariance) ** 2),
                np.sum((cov_naive - exact.covariance) ** 2),
            ]
    return np.column_stack([gammas, np.sqrt(sq / replications)])


def loglog_slopes(table, gamma_max=0.1):
    """Least-squares slopes of log RMSE against log gamma.

    Uses the rows with ``gamma <= gamma_max`` when there are at least two,
    otherwise all rows. Returns ``None`` for fewer than two rows.
    """
    gammas = table[:, 0]
    rows = gammas <= gamma_max * (1 + 1e-12)
    if rows.sum() < 2:
        rows = np.ones_like(gammas, dtype=bool)
    if rows.sum() < 2:
        return None
    x = np.log(gammas[rows])
    out = {"gamma_range": [float(gammas[rows].min()), float(gammas[rows].max())]}
    for j, name in enumerate(RMSE_COLUMNS[1:], start=1):
        out[name] = float(np.polyfit(x, np.log(table[rows, j]), 1)[0])
    return out


def monitoring_target(name):
    """The two monitoring targets and their default robustness constants."""
    if name == "sine2d":
        return sine_2d_target(0.1), 0.1
    if name == "corr-gauss-100":
        return correlated_gaussian_target(100), 0.3
    raise ValueError(f"unknown monitoring target {name!r}; expected 'sine2d' or 'corr-gauss-100'")


def monitor_run(name, s_count=100_000, c=None, seed=0, iters=100, n_ess=1_000, n_threads=None):
    """Run exactly ``iters`` DAIS iterations from ``N(0, I)``; return ``(t, gamma, -elbo)`` rows."""
    target, default_c = monitoring_target(name)
    config = DaisConfig(
        s_count=s_count,
        n_ess=n_ess,
        robustness_c=default_c if c is None else c,
        seed=seed,
        max_iters=iters,
        elbo_patience=None,
        n_threads=n_threads,
    )
    report = run_dais(standard_normal(target.dim), target, config)
    return np.array([[r.t, r.gamma, -r.elbo] for r in report.records]).reshape(-1, 3)
