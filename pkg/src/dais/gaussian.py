"""Multivariate Gaussian parameters, sampling and densities.

Normal variates are generated by inverse-CDF (``scipy.special.ndtri``)
applied to 53-bit uniforms taken from a Philox4x64 counter-based stream
keyed by the seed. Sample ``s`` always consumes stream words
``[s*d, (s+1)*d)``, so a draw is a pure function of ``(seed, s)`` and any
contiguous block of samples can be generated independently.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.special import ndtri

from . import _parallel
from .errors import CholeskyFailure, DimensionMismatch

_LOG_2PI = np.log(2.0 * np.pi)
_U53 = 2.0 ** -53
_SEED_LIMIT = 2 ** 64


def _check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < _SEED_LIMIT:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return seed


def derive_seed(seed, *keys):
    """Derive a 64-bit child seed from ``seed`` and integer ``keys``."""
    ss = np.random.SeedSequence(entropy=_check_seed(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def standard_normal_draws(seed, s_count, d, start=0):
    """Standard-normal draws for samples ``start .. start+s_count-1``.

    Returns an ``(s_count, d)`` array. Row ``i`` depends only on
    ``(seed, start + i)``.
    """
    seed = _check_seed(seed)
    s_count, d, start = int(s_count), int(d), int(start)
    first_word = start * d
    bitgen = np.random.Philox(key=seed)
    blocks, skip = divmod(first_word, 4)
    if blocks:
        bitgen.advance(blocks)
    raw = bitgen.random_raw(skip + s_count * d)[skip:]
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _U53
    return ndtri(u).reshape(s_count, d)


def _cholesky(matrix, what="covariance"):
    try:
        return linalg.cholesky(matrix, lower=True, check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise CholeskyFailure(f"{what} is not numerically positive-definite: {exc}") from None


@dataclass(frozen=True, eq=False)
class GaussianParams:
    """Mean, covariance and cached lower Cholesky factor of a Gaussian.

    Build instances with :func:`gaussian_new`, which validates the inputs
    and computes ``chol``. Arrays are made read-only.
    """

    mean: np.ndarray
    covariance: np.ndarray
    chol: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return self.mean.shape[0]

    def precision(self):
        """Inverse covariance via Cholesky solves, symmetrized."""
        inv = linalg.cho_solve((self.chol, True), np.eye(self.dim))
        return 0.5 * (inv + inv.T)

    def log_det(self):
        return 2.0 * np.sum(np.log(np.diag(self.chol)))


def gaussian_new(mean, covariance):
    """Validate ``(mean, covariance)`` and return :class:`GaussianParams`.

    Raises
    ------
    DimensionMismatch
        If shapes disagree.
    ValueError
        If the covariance is not symmetric to 1e-12 relative tolerance.
    CholeskyFailure
        If the covariance is not positive-definite. No jitter is added.
    """
    mean = np.array(mean, dtype=np.float64).reshape(-1)
    cov = np.array(covariance, dtype=np.float64)
    d = mean.shape[0]
    if d == 0:
        raise DimensionMismatch("mean must be non-empty")
    if cov.ndim == 0 and d == 1:
        cov = cov.reshape(1, 1)
    if cov.shape != (d, d):
        raise DimensionMismatch(f"covariance shape {cov.shape} does not match mean length {d}")
    scale = np.max(np.abs(cov))
    if not np.all(np.isfinite(cov)) or not np.all(np.isfinite(mean)):
        raise ValueError("mean and covariance must be finite")
    if np.max(np.abs(cov - cov.T)) > 1e-12 * max(scale, np.finfo(float).tiny):
        raise ValueError("covariance is not symmetric")
    chol = _cholesky(cov)
    for a in (mean, cov, chol):
        a.setflags(write=False)
    return GaussianParams(mean, cov, chol)


def standard_normal(d):
    return gaussian_new(np.zeros(d), np.eye(d))


def _as_points(params, x):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x2 = np.atleast_2d(x)
    if x2.ndim != 2 or x2.shape[1] != params.dim:
        raise DimensionMismatch(f"expected points of dimension {params.dim}, got shape {x.shape}")
    return x2, single


def gaussian_sample(params, s_count, seed, n_threads=None):
    """Draw ``s_count`` samples as an ``(s_count, d)`` array.

    Row ``s`` equals ``mean + chol @ z_s`` with ``z_s`` from
    :func:`standard_normal_draws`. The result does not depend on
    ``n_threads``.
    """
    s_count = int(s_count)
    if s_count < 1:
        raise ValueError("s_count must be >= 1")
    seed = _check_seed(seed)
    return _parallel.concat(
        _parallel.map_chunks(lambda lo, hi: sample_block(params, seed, lo, hi), s_count, n_threads)
    )


def sample_block(params, seed, lo, hi):
    """Rows ``lo .. hi-1`` of ``gaussian_sample(params, S, seed)`` for any ``S >= hi``."""
    z = standard_normal_draws(seed, hi - lo, params.dim, start=lo)
    return params.mean + z @ params.chol.T


def _whiten(params, x2):
    # rows of L^{-1}(x - mu)
    return linalg.solve_triangular(params.chol, (x2 - params.mean).T, lower=True, check_finite=False).T


def gaussian_log_density(params, x):
    """Log-density at a point ``(d,)`` or at rows of an ``(n, d)`` array."""
    x2, single = _as_points(params, x)
    z = _whiten(params, x2)
    out = -0.5 * np.sum(z * z, axis=1) - 0.5 * (params.dim * _LOG_2PI + params.log_det())
    return out[0] if single else out


def gaussian_grad_log_density(params, x):
    """Gradient ``-Gamma^{-1}(x - mu)``, computed with two triangular solves."""
    x2, single = _as_points(params, x)
    g = -linalg.cho_solve((params.chol, True), (x2 - params.mean).T, check_finite=False).T
    return g[0] if single else g


def damped_gaussian_oracle(proposal, target, gamma):
    """Exact moments of the density proportional to ``q^(1-gamma) * pi^gamma``.

    Both ``proposal`` and ``target`` are Gaussian, so the result is the
    Gaussian whose precision is the ``gamma``-blend of the two precisions.
    Intended as a test oracle.
    """
    if proposal.dim != target.dim:
        raise DimensionMismatch("proposal and target dimensions differ")
    gamma = float(gamma)
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    p_q, p_t = proposal.precision(), target.precision()
    blended = (1.0 - gamma) * p_q + gamma * p_t
    blended = 0.5 * (blended + blended.T)
    chol = _cholesky(blended, "blended precision")
    cov = linalg.cho_solve((chol, True), np.eye(proposal.dim))
    cov = 0.5 * (cov + cov.T)
    rhs = (1.0 - gamma) * p_q @ proposal.mean + gamma * p_t @ target.mean
    mean = linalg.cho_solve((chol, True), rhs)
    return gaussian_new(mean, cov)
