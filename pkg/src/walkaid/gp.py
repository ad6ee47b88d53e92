"""Gaussian-process regression on one-step motion deltas.

Each model regresses one coordinate of the per-step displacement against the
2D state, with a squared-exponential kernel, zero prior mean, and Gaussian
observation noise. Hyperparameters are fit by maximizing the log marginal
likelihood (the evidence) with multi-start L-BFGS-B in log-space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize

from .room import Point2

LOG2PI = math.log(2.0 * math.pi)

# Jitter schedule: relative to the mean kernel diagonal, escalating x10.
JITTER_INIT = 1e-8
JITTER_MAX = 1e-2


class ModelFitError(RuntimeError):
    """Kernel matrix could not be factorized even at maximum jitter."""

    def __init__(self, message: str, hyperparams: "GpHyperparams"):
        super().__init__(f"{message} (hyperparams: {hyperparams})")
        self.hyperparams = hyperparams


@dataclass(frozen=True)
class GpHyperparams:
    """Squared-exponential kernel hyperparameters, all strictly positive."""

    signal_variance: float = 1.0
    length_scales: tuple[float, float] = (1.0, 1.0)
    noise_variance: float = 0.01

    def __post_init__(self):
        vals = (self.signal_variance, *self.length_scales, self.noise_variance)
        if not all(v > 0 and math.isfinite(v) for v in vals):
            raise ValueError(f"hyperparameters must be strictly positive, got {self}")

    def to_log_vector(self) -> np.ndarray:
        return np.log([self.signal_variance, *self.length_scales, self.noise_variance])

    @classmethod
    def from_log_vector(cls, v: np.ndarray) -> "GpHyperparams":
        e = np.exp(np.asarray(v, dtype=float))
        return cls(float(e[0]), (float(e[1]), float(e[2])), float(e[3]))


@dataclass(frozen=True)
class Gaussian1:
    """A 1D Gaussian with nonnegative variance."""

    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError(f"negative variance {self.variance}")


@dataclass(frozen=True)
class FitConfig:
    """Evidence-maximization settings."""

    n_restarts: int = 2
    max_iter: int = 150
    log_bound: tuple[float, float] = (math.log(1e-4), math.log(1e4))
    restart_scale: float = 0.7
    seed: int = 0


def kernel(a: Point2, b: Point2, h: GpHyperparams) -> float:
    """Squared-exponential covariance between two states."""
    lx, ly = h.length_scales
    q = ((a.x - b.x) / lx) ** 2 + ((a.y - b.y) / ly) ** 2
    return h.signal_variance * math.exp(-0.5 * q)


def kernel_matrix(x1: np.ndarray, x2: np.ndarray, h: GpHyperparams) -> np.ndarray:
    """Noise-free covariance matrix between two point sets, shape (n1, n2)."""
    ell = np.asarray(h.length_scales)
    d = (x1[:, None, :] - x2[None, :, :]) / ell
    return h.signal_variance * np.exp(-0.5 * np.sum(d * d, axis=-1))


def _factorize(cov: np.ndarray, h: GpHyperparams) -> tuple[np.ndarray, float]:
    """Cholesky of ``cov`` with escalating diagonal jitter."""
    n = cov.shape[0]
    scale = float(np.mean(np.diag(cov))) or 1.0
    jitter = JITTER_INIT
    while True:
        try:
            L = cholesky(cov + jitter * scale * np.eye(n), lower=True)
            return L, jitter * scale
        except np.linalg.LinAlgError:
            jitter *= 10.0
            if jitter > JITTER_MAX:
                raise ModelFitError("kernel factorization failed", h) from None


class GpModel:
    """A trained (or prior) GP over one delta coordinate.

    Instances are immutable by convention: the Cholesky factor of
    (K + sigma^2 I) and the weight vector are computed once at construction.
    """

    def __init__(self, inputs: np.ndarray, targets: np.ndarray, hyperparams: GpHyperparams):
        inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
        targets = np.asarray(targets, dtype=float).ravel()
        if inputs.size == 0:
            inputs = inputs.reshape(0, 2)
        if inputs.shape[0] != targets.shape[0]:
            raise ValueError("inputs and targets must have the same length")
        if inputs.size and inputs.shape[1] != 2:
            raise ValueError("inputs must be 2D states")
        self.inputs = inputs
        self.targets = targets
        self.hyperparams = hyperparams
        if self.n:
            cov = kernel_matrix(inputs, inputs, hyperparams)
            cov[np.diag_indices_from(cov)] += hyperparams.noise_variance
            self._chol, self.jitter = _factorize(cov, hyperparams)
            self._alpha = cho_solve((self._chol, True), targets)
        else:
            self._chol = None
            self._alpha = np.zeros(0)
            self.jitter = 0.0

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @classmethod
    def prior(cls, hyperparams: GpHyperparams) -> "GpModel":
        """An untrained model; predictions are the prior N(0, signal_variance)."""
        return cls(np.zeros((0, 2)), np.zeros(0), hyperparams)


def predict_batch(model: GpModel, queries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance of the latent delta at each query, shape (m,).

    The variance is the latent posterior (no observation noise), clipped to
    [0, signal_variance].
    """
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    h = model.hyperparams
    if model.n == 0:
        m = queries.shape[0]
        return np.zeros(m), np.full(m, h.signal_variance)
    k_star = kernel_matrix(model.inputs, queries, h)
    mean = k_star.T @ model._alpha
    v = solve_triangular(model._chol, k_star, lower=True)
    var = h.signal_variance - np.einsum("ij,ij->j", v, v)
    return mean, np.clip(var, 0.0, h.signal_variance)


def predict(model: GpModel, query: Point2) -> Gaussian1:
    """Posterior one-step delta distribution at a single state."""
    mean, var = predict_batch(model, np.array([[query.x, query.y]]))
    return Gaussian1(float(mean[0]), float(var[0]))


def log_evidence(model: GpModel) -> float:
    """Log marginal likelihood of the model's training targets."""
    if model.n == 0:
        raise ValueError("log_evidence requires a trained model")
    quad = float(model.targets @ model._alpha)
    logdet = 2.0 * float(np.sum(np.log(np.diag(model._chol))))
    return -0.5 * quad - 0.5 * logdet - 0.5 * model.n * LOG2PI


def _neg_evidence_and_grad(log_theta: np.ndarray, x: np.ndarray, y: np.ndarray):
    """Negative log evidence and its gradient w.r.t. log hyperparameters.

    Gradient uses d(lml)/d(theta_j) = 1/2 tr((aa^T - K^-1) dK/dtheta_j)
    with a = K^-1 y and K the noisy covariance.
    """
    n = x.shape[0]
    sig2, lx2, ly2, noise2 = np.exp(log_theta)  # variances / scales
    diff_x = (x[:, None, 0] - x[None, :, 0]) / lx2
    diff_y = (x[:, None, 1] - x[None, :, 1]) / ly2
    qx = diff_x * diff_x
    qy = diff_y * diff_y
    k_signal = sig2 * np.exp(-0.5 * (qx + qy))
    cov = k_signal + noise2 * np.eye(n)
    try:
        L = cholesky(cov + 1e-12 * np.eye(n), lower=True)
    except np.linalg.LinAlgError:
        return 1e25, np.zeros(4)
    alpha = cho_solve((L, True), y)
    lml = -0.5 * float(y @ alpha) - float(np.sum(np.log(np.diag(L)))) - 0.5 * n * LOG2PI
    k_inv = cho_solve((L, True), np.eye(n))
    inner = np.outer(alpha, alpha) - k_inv
    grads = np.empty(4)
    grads[0] = 0.5 * float(np.sum(inner * k_signal))         # d/d log signal_variance
    grads[1] = 0.5 * float(np.sum(inner * (k_signal * qx)))   # d/d log length_x
    grads[2] = 0.5 * float(np.sum(inner * (k_signal * qy)))   # d/d log length_y
    grads[3] = 0.5 * noise2 * float(np.trace(inner))          # d/d log noise_variance
    return -lml, -grads


def fit(inputs, targets, init: GpHyperparams | None = None,
        cfg: FitConfig | None = None) -> GpModel:
    """Fit hyperparameters by evidence maximization and return the trained model.

    The init point is always kept as a candidate, so the returned model's
    evidence never falls below the init's. Restarts perturb the init in
    log-space with a fixed seed, keeping fits deterministic.
    """
    cfg = cfg or FitConfig()
    init = init or GpHyperparams()
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.asarray(targets, dtype=float).ravel()
    if x.shape[0] < 2:
        raise ValueError("fit needs at least 2 training pairs")

    lo, hi = cfg.log_bound
    bounds = [(lo, hi)] * 4
    theta0 = np.clip(init.to_log_vector(), lo, hi)
    rng = np.random.default_rng(cfg.seed)
    starts = [theta0] + [
        np.clip(theta0 + rng.normal(0.0, cfg.restart_scale, 4), lo, hi)
        for _ in range(cfg.n_restarts)
    ]

    neg0, _ = _neg_evidence_and_grad(theta0, x, y)
    best_theta, best_neg = theta0, neg0
    for start in starts:
        res = minimize(_neg_evidence_and_grad, start, args=(x, y), jac=True,
                       method="L-BFGS-B", bounds=bounds,
                       options={"maxiter": cfg.max_iter})
        if np.isfinite(res.fun) and res.fun < best_neg:
            best_theta, best_neg = res.x, res.fun
    return GpModel(x, y, GpHyperparams.from_log_vector(best_theta))
