"""Unnormalized target densities.

Every target takes points as a ``(d,)`` vector or an ``(n, d)`` batch and
returns log-densities ``(n,)``, gradients ``(n, d)`` and, when available,
Hessians ``(n, d, d)``. Gradients and Hessians are analytic.
"""

from abc import ABC, abstractmethod

import numpy as np
from scipy import linalg
from scipy.special import expit, logsumexp

from .errors import DimensionMismatch, HessianUnavailable, NoConvergence
from .gaussian import _cholesky, gaussian_grad_log_density, gaussian_log_density, gaussian_new


class TargetModel(ABC):
    """Log-density known up to an additive constant, plus its derivatives.

    Subclasses implement the batched ``_log_density``, ``_grad`` and
    (optionally) ``_hessian`` on ``(n, d)`` arrays.
    """

    dim: int

    @property
    def has_hessian(self):
        return type(self)._hessian is not TargetModel._hessian

    @abstractmethod
    def _log_density(self, x):
        ...

    @abstractmethod
    def _grad(self, x):
        ...

    def _hessian(self, x):
        raise HessianUnavailable(f"{type(self).__name__} does not provide a Hessian")

    def _points(self, x):
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        x2 = np.atleast_2d(x)
        if x2.ndim != 2 or x2.shape[1] != self.dim:
            raise DimensionMismatch(f"expected points of dimension {self.dim}, got shape {x.shape}")
        return x2, single

    def log_density(self, x):
        x2, single = self._points(x)
        out = self._log_density(x2)
        return out[0] if single else out

    def grad_log_density(self, x):
        x2, single = self._points(x)
        out = self._grad(x2)
        return out[0] if single else out

    def hessian_log_density(self, x):
        x2, single = self._points(x)
        out = self._hessian(x2)
        return out[0] if single else out


class FunctionTarget(TargetModel):
    """Target assembled from batched callables.

    ``log_density``, ``grad`` and ``hessian`` receive ``(n, d)`` arrays.
    """

    def __init__(self, dim, log_density, grad, hessian=None):
        self.dim = int(dim)
        self._f, self._g, self._h = log_density, grad, hessian

    @property
    def has_hessian(self):
        return self._h is not None

    def _log_density(self, x):
        return np.asarray(self._f(x), dtype=np.float64)

    def _grad(self, x):
        return np.asarray(self._g(x), dtype=np.float64)

    def _hessian(self, x):
        if self._h is None:
            raise HessianUnavailable("no Hessian callable was supplied")
        return np.asarray(self._h(x), dtype=np.float64)


class OffsetTarget(TargetModel):
    """``target`` with ``offset`` added to its log-density."""

    def __init__(self, target, offset):
        self.base = target
        self.offset = float(offset)
        self.dim = target.dim

    @property
    def has_hessian(self):
        return self.base.has_hessian

    def _log_density(self, x):
        return self.base._log_density(x) + self.offset

    def _grad(self, x):
        return self.base._grad(x)

    def _hessian(self, x):
        return self.base._hessian(x)


class GaussianTarget(TargetModel):
    """Normalized Gaussian target ``N(mean, covariance)``.

    ``params`` is exposed for oracle use; the expectations of the gradient
    and Hessian under a Gaussian ``q`` are available in closed form.
    """

    def __init__(self, params):
        self.params = params
        self.dim = params.dim
        self._precision = params.precision()

    def _log_density(self, x):
        return gaussian_log_density(self.params, x)

    def _grad(self, x):
        return gaussian_grad_log_density(self.params, x)

    def _hessian(self, x):
        return np.broadcast_to(-self._precision, (x.shape[0], self.dim, self.dim)).copy()

    def expected_grad(self, q):
        """``E_q[grad log pi] = Sigma^{-1}(m - mu_q)``."""
        return self._precision @ (self.params.mean - q.mean)

    def expected_hessian(self, q):
        return -self._precision.copy()


def correlated_gaussian_target(d, mean_value=1.0, base=0.9, diag_boost=0.1):
    """Gaussian with constant mean and covariance ``base + diag_boost * I``."""
    d = int(d)
    cov = np.full((d, d), float(base)) + float(diag_boost) * np.eye(d)
    return GaussianTarget(gaussian_new(np.full(d, float(mean_value)), cov))


class BananaTarget(TargetModel):
    """Warped Gaussian: ``(x1, x2 + x1**2 + 1) ~ N(0, [[1, rho], [rho, 1]])``."""

    dim = 2

    def __init__(self, rho=0.9):
        self.rho = float(rho)
        self._cinv = np.linalg.inv(np.array([[1.0, self.rho], [self.rho, 1.0]]))

    def _warp(self, x):
        return np.column_stack([x[:, 0], x[:, 1] + x[:, 0] ** 2 + 1.0])

    def _log_density(self, x):
        y = self._warp(x)
        return -0.5 * np.einsum("ni,ij,nj->n", y, self._cinv, y)

    def _grad(self, x):
        gy = -self._warp(x) @ self._cinv
        return np.column_stack([gy[:, 0] + 2.0 * x[:, 0] * gy[:, 1], gy[:, 1]])

    def _hessian(self, x):
        n = x.shape[0]
        gy = -self._warp(x) @ self._cinv
        jac = np.zeros((n, 2, 2))
        jac[:, 0, 0] = 1.0
        jac[:, 1, 0] = 2.0 * x[:, 0]
        jac[:, 1, 1] = 1.0
        h = -np.einsum("nki,kl,nlj->nij", jac, self._cinv, jac)
        h[:, 0, 0] += 2.0 * gy[:, 1]
        return h

    def exact_moments(self):
        """Mean and covariance in closed form (Gaussian moments of the unwarped pair)."""
        mean = np.array([0.0, -2.0])
        cov = np.array([[1.0, self.rho], [self.rho, 3.0]])
        return mean, cov


def banana_target():
    return BananaTarget()


class MixtureTarget(TargetModel):
    """Finite mixture of Gaussians, evaluated with log-sum-exp."""

    def __init__(self, weights, means, covariances):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.components = [gaussian_new(m, c) for m, c in zip(means, covariances)]
        self.dim = self.components[0].dim
        self._log_w = np.log(self.weights)
        self._precisions = [c.precision() for c in self.components]

    def _parts(self, x):
        logs = np.stack([gaussian_log_density(c, x) for c in self.components], axis=1) + self._log_w
        grads = np.stack([gaussian_grad_log_density(c, x) for c in self.components], axis=1)
        return logs, grads

    def _log_density(self, x):
        logs, _ = self._parts(x)
        return logsumexp(logs, axis=1)

    def _grad(self, x):
        logs, grads = self._parts(x)
        resp = np.exp(logs - logsumexp(logs, axis=1, keepdims=True))
        return np.einsum("nk,nkd->nd", resp, grads)

    def _hessian(self, x):
        logs, grads = self._parts(x)
        resp = np.exp(logs - logsumexp(logs, axis=1, keepdims=True))
        gbar = np.einsum("nk,nkd->nd", resp, grads)
        second = np.einsum("nk,nki,nkj->nij", resp, grads, grads)
        second -= np.einsum("ni,nj->nij", gbar, gbar)
        second -= np.einsum("nk,kij->nij", resp, np.stack(self._precisions))
        return second

    def exact_moments(self):
        """Mixture mean ``sum w_k m_k`` and covariance ``sum w_k (S_k + m_k m_k^T) - m m^T``."""
        means = np.stack([c.mean for c in self.components])
        mean = self.weights @ means
        second = sum(w * (c.covariance + np.outer(c.mean, c.mean)) for w, c in zip(self.weights, self.components))
        return mean, second - np.outer(mean, mean)


def mixture_target():
    return MixtureTarget(
        weights=[0.3, 0.7],
        means=[[0.8, 0.8], [-2.0, -2.0]],
        covariances=[[[1.0, 0.8], [0.8, 1.0]], [[1.0, -0.6], [-0.6, 1.0]]],
    )


class Sine2DTarget(TargetModel):
    """Standard-normal prior times a narrow ridge around ``x2 = 1 + sin(2 x1)``."""

    dim = 2

    def __init__(self, sigma=0.1):
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        self.sigma = float(sigma)

    def _resid(self, x):
        return x[:, 1] - 1.0 - np.sin(2.0 * x[:, 0])

    def _log_density(self, x):
        r = self._resid(x)
        return -0.5 * (r / self.sigma) ** 2 - 0.5 * np.sum(x * x, axis=1) - np.log(2.0 * np.pi)

    def _grad(self, x):
        r = self._resid(x) / self.sigma ** 2
        return np.column_stack([2.0 * r * np.cos(2.0 * x[:, 0]) - x[:, 0], -r - x[:, 1]])

    def _hessian(self, x):
        s2 = self.sigma ** 2
        r = self._resid(x)
        c, s = np.cos(2.0 * x[:, 0]), np.sin(2.0 * x[:, 0])
        h = np.empty((x.shape[0], 2, 2))
        h[:, 0, 0] = (-4.0 * c * c - 4.0 * r * s) / s2 - 1.0
        h[:, 0, 1] = h[:, 1, 0] = 2.0 * c / s2
        h[:, 1, 1] = -1.0 / s2 - 1.0
        return h


def sine_2d_target(sigma=0.1):
    return Sine2DTarget(sigma)


def log_sigmoid(z):
    """``log(1 / (1 + exp(-z)))`` without overflow for large ``|z|``."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = -np.log1p(np.exp(-z[pos]))
    out[~pos] = z[~pos] - np.log1p(np.exp(z[~pos]))
    return out


class LogisticTarget(TargetModel):
    """Bayesian logistic regression posterior with an isotropic Gaussian prior."""

    def __init__(self, data):
        self.data = data
        self.dim = data.features.shape[1]
        self._ya = data.labels[:, None] * data.features
        self._prior_prec = 1.0 / data.prior_variance

    def _log_density(self, x):
        z = x @ self._ya.T
        return np.sum(log_sigmoid(z), axis=1) - 0.5 * self._prior_prec * np.sum(x * x, axis=1)

    def _grad(self, x):
        z = x @ self._ya.T
        return expit(-z) @ self._ya - self._prior_prec * x

    def _hessian(self, x):
        p = expit(x @ self.data.features.T)
        w = p * (1.0 - p)
        a = self.data.features
        h = -np.einsum("ni,ij,ik->njk", w, a, a)
        h -= self._prior_prec * np.eye(self.dim)
        return h


def logistic_target(data):
    return LogisticTarget(data)


def target_from_gaussian(params):
    """Wrap ``params`` as a target whose log-density is the Gaussian's own."""
    return GaussianTarget(params)


def laplace_init(target, x0, max_newton_iters=50, grad_tol=1e-8, max_halvings=30):
    """Laplace approximation: Newton ascent to the mode, covariance ``(-H)^{-1}``.

    Each Newton step is halved until the log-density does not decrease,
    at most ``max_halvings`` times.

    Raises
    ------
    HessianUnavailable
        If the target has no Hessian.
    NoConvergence
        If ``max(|grad|) < grad_tol`` is not reached in ``max_newton_iters``
        iterations, or step halving is exhausted.
    CholeskyFailure
        If ``-H`` at the mode is not positive-definite.
    """
    if not target.has_hessian:
        raise HessianUnavailable(f"{type(target).__name__} does not provide a Hessian")
    x = np.array(x0, dtype=np.float64).reshape(-1)
    if x.shape[0] != target.dim:
        raise DimensionMismatch("x0 has the wrong dimension")
    f = target.log_density(x)
    g = target.grad_log_density(x)
    n_iter = 0
    while np.max(np.abs(g)) >= grad_tol:
        if n_iter == max_newton_iters:
            raise NoConvergence(
                f"gradient norm {np.max(np.abs(g)):.3g} >= {grad_tol} after {max_newton_iters} Newton iterations"
            )
        n_iter += 1
        neg_h = -target.hessian_log_density(x)
        try:
            chol = linalg.cholesky(0.5 * (neg_h + neg_h.T), lower=True)
            step = linalg.cho_solve((chol, True), g)
        except linalg.LinAlgError:
            # indefinite curvature away from the mode: fall back to ascent
            step = g / max(1.0, np.max(np.abs(g)))
        for _ in range(max_halvings + 1):
            x_new = x + step
            f_new = target.log_density(x_new)
            if np.isfinite(f_new) and f_new >= f:
                break
            step = 0.5 * step
        else:
            raise NoConvergence(f"step halving failed after {max_halvings} halvings")
        x, f = x_new, f_new
        g = target.grad_log_density(x)
    neg_h = -target.hessian_log_density(x)
    chol = _cholesky(0.5 * (neg_h + neg_h.T), "negative Hessian at the mode")
    cov = linalg.cho_solve((chol, True), np.eye(target.dim))
    return gaussian_new(x, 0.5 * (cov + cov.T))
