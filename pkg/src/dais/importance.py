"""Importance-sampling machinery shared by DAIS and the plain-AIS ablation.

A :class:`ParticleBatch` holds samples from the current Gaussian proposal
together with the log-discrepancy ``phi = log pi - log q`` and its
gradient. Weights for a damping level ``gamma`` are ``exp(gamma * phi)``,
always handled in the log domain.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from . import _parallel
from .errors import DimensionMismatch, NonFiniteDensity
from .gaussian import gaussian_grad_log_density, gaussian_log_density, sample_block


@dataclass(frozen=True, eq=False)
class ParticleBatch:
    samples: np.ndarray
    proposal_logpdf: np.ndarray
    target_logpdf: np.ndarray
    phi: np.ndarray
    grad_phi: np.ndarray

    @property
    def size(self):
        return self.samples.shape[0]


def build_batch(proposal, target, s_count, seed, n_threads=None):
    """Sample ``s_count`` points from ``proposal`` and evaluate the target on them.

    Raises :class:`NonFiniteDensity` naming the first sample whose target
    log-density or gradient is not finite.
    """
    if target.dim != proposal.dim:
        raise DimensionMismatch(f"target dimension {target.dim} != proposal dimension {proposal.dim}")
    s_count = int(s_count)
    if s_count < 1:
        raise ValueError("s_count must be >= 1")

    def block(lo, hi):
        x = sample_block(proposal, seed, lo, hi)
        lq = gaussian_log_density(proposal, x)
        lp = target.log_density(x)
        # grad log q = -Gamma^{-1}(x - mu)
        gphi = target.grad_log_density(x) - gaussian_grad_log_density(proposal, x)
        return x, lq, lp, gphi

    parts = _parallel.map_chunks(block, s_count, n_threads)
    x, lq, lp, gphi = (np.concatenate(p, axis=0) for p in zip(*parts))
    bad = ~(np.isfinite(lp) & np.all(np.isfinite(gphi), axis=1))
    if bad.any():
        raise NonFiniteDensity(np.flatnonzero(bad)[0])
    return ParticleBatch(x, lq, lp, lp - lq, gphi)


def _log_weights(phi, gamma):
    return gamma * np.asarray(phi, dtype=np.float64)


def ess_from_phi(phi, gamma):
    """Effective sample size ``(sum w)^2 / sum w^2`` of ``w = exp(gamma * phi)``."""
    a = _log_weights(phi, gamma)
    v = np.exp(a - np.max(a))
    return float(np.sum(v) ** 2 / np.sum(v * v))


def normalized_weights(phi, gamma):
    a = _log_weights(phi, gamma)
    return np.exp(a - logsumexp(a))


@dataclass(frozen=True, eq=False)
class DampingSolution:
    gamma: float
    normalized_weights: np.ndarray
    ess: float
    at_upper_bound: bool
    at_lower_bound: bool


def solve_damping(phi, n_ess, gamma_min=1e-6, bisection_tol=1e-6):
    """Largest ``gamma`` in ``[gamma_min, 1]`` whose ESS is at least ``n_ess``.

    ESS is non-increasing in ``gamma``, so bisection is used; the lower end
    of the final bracket is returned, which keeps the ESS guarantee exact.
    When even ``gamma_min`` misses the target it is returned with
    ``at_lower_bound`` set.
    """
    phi = np.asarray(phi, dtype=np.float64)
    s = phi.shape[0]
    if not 1.0 < n_ess < s:
        raise ValueError(f"need 1 < n_ess < S, got n_ess={n_ess}, S={s}")

    def solution(gamma, upper=False, lower=False):
        return DampingSolution(gamma, normalized_weights(phi, gamma), ess_from_phi(phi, gamma), upper, lower)

    if ess_from_phi(phi, 1.0) >= n_ess:
        return solution(1.0, upper=True)
    if ess_from_phi(phi, gamma_min) < n_ess:
        return solution(gamma_min, lower=True)
    lo, hi = gamma_min, 1.0
    while hi - lo >= bisection_tol:
        mid = 0.5 * (lo + hi)
        if ess_from_phi(phi, mid) >= n_ess:
            lo = mid
        else:
            hi = mid
    return solution(lo)


def _check_weights(batch, weights):
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (batch.size,):
        raise DimensionMismatch(f"weights have shape {weights.shape}, batch has {batch.size} samples")
    return weights


def stein_moment_estimates(batch, proposal, weights):
    """Gradient-based (Stein) estimates of the damped-target moment shifts.

    Returns ``(g_mu, g_gamma)`` with ``g_mu = Gamma * E_w[grad phi]`` and
    ``g_gamma`` the symmetrized weighted covariance between
    ``Gamma * grad phi`` and ``x``. The damped mean and covariance are
    ``mu + gamma * g_mu`` and ``Gamma + gamma * g_gamma``.
    """
    weights = _check_weights(batch, weights)
    if proposal.dim != batch.samples.shape[1]:
        raise DimensionMismatch("proposal and batch dimensions differ")
    gw = batch.grad_phi @ proposal.covariance
    g_mu = weights @ gw
    xbar = weights @ batch.samples
    raw = (gw - g_mu).T @ ((batch.samples - xbar) * weights[:, None])
    return g_mu, 0.5 * (raw + raw.T)


def naive_moment_estimates(batch, weights):
    """Self-normalized IS mean and (1/sum-w normalized) covariance."""
    weights = _check_weights(batch, weights)
    mean = weights @ batch.samples
    xc = batch.samples - mean
    cov = xc.T @ (xc * weights[:, None])
    return mean, 0.5 * (cov + cov.T)


def elbo_estimate(batch):
    """Plain Monte Carlo ELBO of the proposal: the mean of ``phi``."""
    if batch.size < 1:
        raise ValueError("empty batch")
    return float(np.mean(batch.phi))
