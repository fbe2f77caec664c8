"""Comparison methods built on the same Gaussian machinery.

* Natural-gradient VI on the reverse KL, i.e. the small-damping limit of
  DAIS. The precision is updated as a convex combination, which keeps it
  positive-definite for log-concave targets.
* Plain adaptive IS: DAIS with the gradient-based control variates
  replaced by standard self-normalized moment estimates.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from . import _parallel
from .core import IterationRecord, RunReport, StopReason, moment_step, run_adaptive
from .errors import ConfigError, HessianUnavailable
from .gaussian import _cholesky, derive_seed, gaussian_log_density, gaussian_new, sample_block
from .importance import naive_moment_estimates


@dataclass(frozen=True)
class NgviConfig:
    step_size: float = 0.1
    s_count: int = 1_000
    max_iters: int = 500
    grad_tol: float = 1e-4
    seed: int = 0
    use_analytic_expectations: bool = False
    n_threads: int | None = None

    def __post_init__(self):
        if not 0 < self.step_size <= 1:
            raise ConfigError(f"step_size must lie in (0, 1], got {self.step_size}")
        if self.s_count < 1 or self.max_iters < 0:
            raise ConfigError("s_count must be >= 1 and max_iters >= 0")


def _mc_expectations(proposal, target, config, seed_t):
    """Sample once; return E_q[grad], E_q[Hessian] and the MC ELBO."""

    def block(lo, hi):
        x = sample_block(proposal, seed_t, lo, hi)
        lp = target.log_density(x)
        lq = gaussian_log_density(proposal, x)
        g = target.grad_log_density(x)
        h = target.hessian_log_density(x) if not config.use_analytic_expectations else None
        return (
            np.sum(lp - lq),
            np.sum(g, axis=0),
            None if h is None else np.sum(h, axis=0),
        )

    parts = _parallel.map_chunks(block, config.s_count, config.n_threads)
    n = config.s_count
    elbo = sum(p[0] for p in parts) / n
    grad = sum(p[1] for p in parts) / n
    hess = None if config.use_analytic_expectations else sum(p[2] for p in parts) / n
    return grad, hess, float(elbo)


def _expectations(proposal, target, config, seed_t):
    if not target.has_hessian:
        raise HessianUnavailable(f"{type(target).__name__} does not provide a Hessian")
    grad, hess, elbo = _mc_expectations(proposal, target, config, seed_t)
    if config.use_analytic_expectations:
        if not hasattr(target, "expected_grad"):
            raise ConfigError("analytic expectations need a Gaussian target")
        grad, hess = target.expected_grad(proposal), target.expected_hessian(proposal)
    return grad, 0.5 * (hess + hess.T), elbo


def natural_gradient(proposal, grad, hess):
    """Reverse-KL natural gradient: ``(Gamma E[g], Gamma E[H] Gamma + Gamma)``."""
    cov = proposal.covariance
    return cov @ grad, cov @ hess @ cov + cov


def _ngvi_update(proposal, grad, hess, zeta):
    precision = proposal.precision()
    new_precision = (1.0 - zeta) * precision - zeta * hess
    new_precision = 0.5 * (new_precision + new_precision.T)
    chol = _cholesky(new_precision, "updated precision")
    cov = linalg.cho_solve((chol, True), np.eye(proposal.dim))
    mean = proposal.mean + zeta * (proposal.covariance @ grad)
    return gaussian_new(mean, 0.5 * (cov + cov.T))


def ngvi_step(proposal, target, config, seed_t):
    """One natural-gradient step on the reverse KL.

    Raises :class:`CholeskyFailure` when the updated precision is not
    positive-definite and :class:`HessianUnavailable` for targets without
    a Hessian.
    """
    grad, hess, _ = _expectations(proposal, target, config, seed_t)
    return _ngvi_update(proposal, grad, hess, config.step_size)


def run_ngvi(initial, target, config=None):
    """Natural-gradient VI until ``max|natural gradient| < grad_tol`` or ``max_iters``.

    Records carry ``gamma = ess = nan``; NGVI has no damping or weights.
    """
    config = config or NgviConfig()
    proposal = initial
    records = []
    reason = StopReason.MAX_ITERS
    for t in range(1, config.max_iters + 1):
        grad, hess, elbo = _expectations(proposal, target, config, derive_seed(config.seed, t))
        nat_mu, nat_cov = natural_gradient(proposal, grad, hess)
        if max(np.max(np.abs(nat_mu)), np.max(np.abs(nat_cov))) < config.grad_tol:
            reason = StopReason.GRAD_TOL
            break
        proposal = _ngvi_update(proposal, grad, hess, config.step_size)
        records.append(
            IterationRecord(t=t, gamma=np.nan, ess=np.nan, elbo=elbo, mean=proposal.mean, covariance=proposal.covariance)
        )
    return RunReport(records=records, final=proposal, stopped_reason=reason)


def naive_direction(batch, proposal, damping):
    # moment replacement written as a shift so it shares DAIS's c*gamma step and PD repair
    mean_hat, cov_hat = naive_moment_estimates(batch, damping.normalized_weights)
    return (mean_hat - proposal.mean) / damping.gamma, (cov_hat - proposal.covariance) / damping.gamma


def plain_ais_step(proposal, target, config, seed_t, t=1):
    return moment_step(proposal, target, config, seed_t, t, naive_direction)


def run_plain_ais(initial, target, config):
    """Adaptive IS with standard moment estimates blended by ``robustness_c``."""
    return run_adaptive(initial, target, config, plain_ais_step)
