"""Binary Gaussian-process classification with a Laplace approximation.

Kernel: constant variance times an isotropic RBF, with hyperparameters
optimized over bounded log-space (coarse grid multi-start followed by
Nelder-Mead refinement of the approximate log marginal likelihood).
Logistic link; predictive probabilities integrate the link over the
latent Gaussian with Gauss-Hermite quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.optimize import minimize

DEFAULT_SIGMA2_BOUNDS = (1e-3, 1e3)
DEFAULT_LENGTHSCALE_BOUNDS = (1e-2, 1e2)


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def rbf_kernel(xa, xb, sigma2, lengthscale):
    xa = np.atleast_2d(np.asarray(xa, dtype=float))
    xb = np.atleast_2d(np.asarray(xb, dtype=float))
    d2 = ((xa[:, None, :] - xb[None, :, :]) ** 2).sum(axis=2)
    return sigma2 * np.exp(-0.5 * d2 / lengthscale**2)


def _laplace_mode(K, y, tol=1e-10, max_iter=200):
    """Newton iteration for the posterior mode (stable B-matrix form)."""
    n = len(y)
    f = np.zeros(n)
    a = np.zeros(n)
    obj_prev = -np.inf
    for _ in range(max_iter):
        pi = _sigmoid(f)
        W = pi * (1.0 - pi)
        sw = np.sqrt(W)
        B = np.eye(n) + sw[:, None] * K * sw[None, :]
        L = cholesky(B, lower=True)
        b = W * f + (y - pi)
        v = solve_triangular(L, sw * (K @ b), lower=True)
        a = b - sw * solve_triangular(L.T, v, lower=False)
        f = K @ a
        # log p(y|f) for logistic link
        loglik = -np.logaddexp(0.0, -(2.0 * y - 1.0) * f).sum()
        obj = -0.5 * (a @ f) + loglik
        if abs(obj - obj_prev) < tol:
            break
        obj_prev = obj
    pi = _sigmoid(f)
    W = pi * (1.0 - pi)
    sw = np.sqrt(W)
    B = np.eye(n) + sw[:, None] * K * sw[None, :]
    L = cholesky(B, lower=True)
    grad_norm = float(np.linalg.norm((y - pi) - a))
    logml = (-0.5 * (a @ f)
             - np.logaddexp(0.0, -(2.0 * y - 1.0) * f).sum()
             - np.log(np.diagonal(L)).sum())
    return f, pi, sw, L, grad_norm, float(logml)


@dataclass
class GPCModel:
    x_train: np.ndarray
    y_train: np.ndarray
    sigma2: float
    lengthscale: float
    f_hat: np.ndarray
    pi_hat: np.ndarray
    sqrt_w: np.ndarray
    chol_b: np.ndarray
    grad_norm: float
    log_marginal_likelihood: float


def gpc_train(x, y, sigma2_bounds=DEFAULT_SIGMA2_BOUNDS,
              lengthscale_bounds=DEFAULT_LENGTHSCALE_BOUNDS,
              grid_size: int = 7, optimize: bool = True,
              sigma2: float | None = None,
              lengthscale: float | None = None) -> GPCModel:
    """Fit the Laplace GPC; hyperparameters default to marginal-likelihood
    maximization within bounds (pass sigma2/lengthscale to pin them)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if set(np.unique(y)) - {0.0, 1.0}:
        raise ValueError("labels must be binary 0/1")
    if len(np.unique(y)) < 2:
        raise ValueError("training set must contain both classes")

    def neg_logml(log_theta):
        s2 = float(np.clip(np.exp(log_theta[0]), *sigma2_bounds))
        ls = float(np.clip(np.exp(log_theta[1]), *lengthscale_bounds))
        K = rbf_kernel(x, x, s2, ls)
        try:
            _, _, _, _, _, logml = _laplace_mode(K, y)
        except np.linalg.LinAlgError:
            return np.inf
        return -logml

    if sigma2 is not None and lengthscale is not None:
        best = (sigma2, lengthscale)
    elif not optimize:
        best = (1.0, 1.0)
    else:
        s2_grid = np.exp(np.linspace(*np.log(sigma2_bounds), grid_size))
        ls_grid = np.exp(np.linspace(*np.log(lengthscale_bounds), grid_size))
        best_val = np.inf
        best = (1.0, 1.0)
        for s2 in s2_grid:
            for ls in ls_grid:
                val = neg_logml(np.log([s2, ls]))
                if val < best_val:
                    best_val = val
                    best = (s2, ls)
        res = minimize(neg_logml, np.log(best), method="Nelder-Mead",
                       options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 500})
        if res.fun < best_val:
            best = tuple(np.clip(np.exp(res.x),
                                 [sigma2_bounds[0], lengthscale_bounds[0]],
                                 [sigma2_bounds[1], lengthscale_bounds[1]]))

    s2, ls = float(best[0]), float(best[1])
    K = rbf_kernel(x, x, s2, ls)
    f, pi, sw, L, grad_norm, logml = _laplace_mode(K, y)
    return GPCModel(
        x_train=x, y_train=y, sigma2=s2, lengthscale=ls,
        f_hat=f, pi_hat=pi, sqrt_w=sw, chol_b=L,
        grad_norm=grad_norm, log_marginal_likelihood=logml,
    )


_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite.hermgauss(64)


def gpc_predict(model: GPCModel, x_star) -> np.ndarray:
    """Predictive probability of class 1 at each query point."""
    x_star = np.atleast_2d(np.asarray(x_star, dtype=float))
    ks = rbf_kernel(x_star, model.x_train, model.sigma2, model.lengthscale)
    mean = ks @ (model.y_train - model.pi_hat)
    v = solve_triangular(model.chol_b, (model.sqrt_w[:, None] * ks.T),
                         lower=True)
    var = model.sigma2 - (v**2).sum(axis=0)
    var = np.clip(var, 0.0, None)
    z = mean[:, None] + np.sqrt(2.0 * var)[:, None] * _GH_NODES[None, :]
    probs = (_GH_WEIGHTS[None, :] * _sigmoid(z)).sum(axis=1) / np.sqrt(np.pi)
    return np.clip(probs, 1e-12, 1.0 - 1e-12)
