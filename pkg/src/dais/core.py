"""Doubly adaptive importance sampling.

Each iteration draws a batch from the current Gaussian ``q_t``, picks the
largest damping ``gamma_t`` whose importance weights keep the ESS above
``n_ess``, estimates the moments of ``q_t^(1-gamma_t) pi^gamma_t`` with
gradient-based control variates and moves ``q_t`` a fraction
``c * gamma_t`` of the way there.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .gaussian import derive_seed, gaussian_new
from .importance import build_batch, elbo_estimate, solve_damping, stein_moment_estimates


class StopReason(str, enum.Enum):
    ELBO_PLATEAU = "ElboPlateau"
    MAX_ITERS = "MaxIters"
    GRAD_TOL = "GradTol"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class DaisConfig:
    """Settings for :func:`run_dais` and :func:`dais.baselines.run_plain_ais`.

    ``eigen_floor`` is relative: the eigenvalue clamp used as the last PD
    repair is ``eigen_floor * mean(diag(Gamma_t))``. ``elbo_patience=None``
    disables plateau stopping so exactly ``max_iters`` iterations run.
    """

    s_count: int = 100_000
    n_ess: float = 1_000
    robustness_c: float = 0.5
    seed: int = 0
    max_iters: int = 200
    elbo_patience: int | None = 5
    elbo_rel_tol: float = 1e-3
    gamma_min: float = 1e-6
    bisection_tol: float = 1e-6
    pd_max_halvings: int = 10
    eigen_floor: float = 1e-8
    n_threads: int | None = None

    def __post_init__(self):
        if not 1 < self.n_ess < self.s_count:
            raise ConfigError(f"need 1 < n_ess < s_count, got n_ess={self.n_ess}, s_count={self.s_count}")
        if not 0 < self.robustness_c <= 1:
            raise ConfigError(f"robustness_c must lie in (0, 1], got {self.robustness_c}")
        if self.max_iters < 0:
            raise ConfigError("max_iters must be >= 0")
        if self.elbo_patience is not None and self.elbo_patience < 1:
            raise ConfigError("elbo_patience must be >= 1 or None")
        if not 0 < self.gamma_min < 1:
            raise ConfigError("gamma_min must lie in (0, 1)")
        if self.bisection_tol <= 0 or self.eigen_floor <= 0 or self.pd_max_halvings < 0:
            raise ConfigError("bisection_tol and eigen_floor must be positive, pd_max_halvings >= 0")


@dataclass(frozen=True, eq=False)
class IterationRecord:
    """One iteration of an adaptive run.

    ``gamma``, ``ess`` and ``elbo`` describe the batch drawn from the
    proposal ``q_t``; ``mean`` and ``covariance`` are those of ``q_{t+1}``.
    """

    t: int
    gamma: float
    ess: float
    elbo: float
    mean: np.ndarray
    covariance: np.ndarray
    pd_repairs: int = 0
    at_lower_bound: bool = False


@dataclass(frozen=True, eq=False)
class RunReport:
    records: list = field(default_factory=list)
    final: object = None
    stopped_reason: StopReason = StopReason.MAX_ITERS

    @property
    def iterations(self):
        return len(self.records)

    def gammas(self):
        return np.array([r.gamma for r in self.records])

    def elbos(self):
        return np.array([r.elbo for r in self.records])


def _is_pd(matrix):
    try:
        np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        return False
    return True


def repair_covariance(candidate, gamma, g_gamma_hat, base, config):
    """Make ``candidate = base + c * gamma * g_gamma_hat`` positive-definite.

    ``gamma`` is halved (reusing ``g_gamma_hat``, no new target evaluations)
    up to ``config.pd_max_halvings`` times. If that still fails, the last
    candidate's eigenvalues are clamped from below.

    Returns ``(matrix, repairs, effective_gamma)``; the caller scales the
    mean step with ``effective_gamma`` too.
    """
    c = config.robustness_c
    matrix = np.asarray(candidate, dtype=np.float64)
    if _is_pd(matrix):
        return matrix, 0, gamma
    eff = gamma
    repairs = 0
    for _ in range(config.pd_max_halvings):
        eff *= 0.5
        repairs += 1
        matrix = base + (c * eff) * g_gamma_hat
        if _is_pd(matrix):
            return matrix, repairs, eff
    floor = config.eigen_floor * float(np.mean(np.diag(base)))
    vals, vecs = np.linalg.eigh(matrix)
    fixed = (vecs * np.maximum(vals, floor)) @ vecs.T
    return 0.5 * (fixed + fixed.T), repairs + 1, eff


def stein_direction(batch, proposal, damping):
    return stein_moment_estimates(batch, proposal, damping.normalized_weights)


def moment_step(proposal, target, config, seed_t, t, direction):
    """One damped moment-matching update.

    ``direction(batch, proposal, damping)`` returns ``(g_mu, g_gamma)`` such
    that the damped-target moments are ``mu + gamma * g_mu`` and
    ``Gamma + gamma * g_gamma``.
    """
    batch = build_batch(proposal, target, config.s_count, seed_t, config.n_threads)
    elbo = elbo_estimate(batch)
    damping = solve_damping(batch.phi, config.n_ess, config.gamma_min, config.bisection_tol)
    g_mu, g_gamma = direction(batch, proposal, damping)
    gamma = damping.gamma
    base = proposal.covariance
    step = config.robustness_c * gamma
    cov, repairs, eff = repair_covariance(base + step * g_gamma, gamma, g_gamma, base, config)
    mean = proposal.mean + (config.robustness_c * eff) * g_mu
    new = gaussian_new(mean, cov)
    record = IterationRecord(
        t=t,
        gamma=gamma,
        ess=damping.ess,
        elbo=elbo,
        mean=new.mean,
        covariance=new.covariance,
        pd_repairs=repairs,
        at_lower_bound=damping.at_lower_bound,
    )
    return new, record


def dais_step(proposal, target, config, seed_t, t=1):
    """Advance ``proposal`` by one DAIS iteration; returns ``(new_proposal, record)``."""
    return moment_step(proposal, target, config, seed_t, t, stein_direction)


class _Plateau:
    """Tracks ELBO improvements against the running maximum."""

    def __init__(self, patience, rel_tol):
        self.patience, self.rel_tol = patience, rel_tol
        self.best = -np.inf
        self.stall = 0

    def update(self, elbo):
        if not np.isfinite(self.best) or elbo > self.best + self.rel_tol * max(1.0, abs(self.best)):
            self.stall = 0
        else:
            self.stall += 1
        self.best = max(self.best, elbo)
        return self.patience is not None and self.stall >= self.patience


def run_adaptive(initial, target, config, step):
    """Iterate ``step(proposal, target, config, seed_t, t)`` with ELBO-plateau stopping."""
    proposal = initial
    records = []
    plateau = _Plateau(config.elbo_patience, config.elbo_rel_tol)
    reason = StopReason.MAX_ITERS
    for t in range(1, config.max_iters + 1):
        proposal, record = step(proposal, target, config, derive_seed(config.seed, t), t)
        records.append(record)
        if plateau.update(record.elbo):
            reason = StopReason.ELBO_PLATEAU
            break
    return RunReport(records=records, final=proposal, stopped_reason=reason)


def run_dais(initial, target, config=None):
    """Run DAIS from ``initial`` and return the final Gaussian with the full trace."""
    return run_adaptive(initial, target, config or DaisConfig(), dais_step)
