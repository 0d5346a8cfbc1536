"""Truncated joint Gaussian model, MMSE value function and conditioning.

Coordinates are ``r = (c_1, ..., c_N, eps_1, ..., eps_m)``: the first N basis
coefficients of the unknown signal followed by the observation noise.  The
observation vector is ``y = B r`` with ``B = [H, I_m]`` and
``H[j, n] = t_n e_n(x_j)``; the estimand coefficients are ``A r``.  All L2
norms of fields reduce to Euclidean norms of coefficient vectors because the
basis is orthonormal, so no quadrature enters any objective.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import SingularModelError
from .operators import SpectralOperator
from .spectral import PriorSpectrum, SpectralBasis, evaluate_basis

__all__ = [
    "DesignPoints",
    "ObservationMap",
    "JointGaussian",
    "AffineEstimator",
    "design_points",
    "nominal_covariance",
    "observation_map",
    "mmse_value",
    "optimal_affine_estimator",
    "affine_risk",
    "bayes_risk_gradient",
    "posterior_coefficient_gaussian",
    "signal_block_posterior",
    "field_second_moments",
    "sample_paths",
    "marginal_intervals",
]

PSD_TOL = 1e-10


@dataclass(frozen=True)
class DesignPoints:
    """Strictly increasing design locations in the open interval (0, 1)."""

    xs: np.ndarray
    label: str = "custom"

    @property
    def m(self) -> int:
        return self.xs.shape[0]


def design_points(kind: str, m: int = 10, xs=None) -> DesignPoints:
    """Standard designs: ``whole`` is x_i = i/11, ``half`` is x_i = i/22.

    ``custom`` takes explicit points, which must be strictly increasing and
    interior to (0, 1).
    """
    if kind == "whole":
        pts = np.arange(1, m + 1) / (m + 1.0)
    elif kind == "half":
        pts = np.arange(1, m + 1) / (2.0 * (m + 1.0))
    elif kind == "custom":
        if xs is None:
            raise ValueError("custom design requires explicit points")
        pts = np.asarray(xs, dtype=float)
    else:
        raise ValueError(f"unknown design kind {kind!r}")
    if pts.size == 0:
        raise ValueError("design must contain at least one point")
    if np.any(pts <= 0.0) or np.any(pts >= 1.0):
        raise ValueError("design points must lie strictly inside (0, 1)")
    if np.any(np.diff(pts) <= 0.0):
        raise ValueError("design points must be strictly increasing")
    pts = pts.copy()
    pts.flags.writeable = False
    return DesignPoints(xs=pts, label=kind)


@dataclass(frozen=True)
class ObservationMap:
    """Observation matrix H and estimand selector A on the joint space."""

    H: np.ndarray        # (m, N): t_n e_n(x_j)
    A_target: np.ndarray  # (N, N+m)
    target: str           # "regression" (estimate T b) or "inverse" (estimate b)

    @property
    def n_modes(self) -> int:
        return self.H.shape[1]

    @property
    def n_obs(self) -> int:
        return self.H.shape[0]

    @property
    def B(self) -> np.ndarray:
        """Observation selector [H, I_m] on the joint space."""
        m = self.n_obs
        return np.concatenate([self.H, np.eye(m)], axis=1)


@dataclass(frozen=True)
class JointGaussian:
    """Centered Gaussian on the coefficient-plus-noise space.

    The covariance is symmetrized on construction and must be PSD up to
    ``-PSD_TOL * trace``.  Means are structurally zero: optimal adversarial
    perturbations of a centered model are centered.
    """

    cov: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.cov, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"covariance must be square, got shape {c.shape}")
        c = 0.5 * (c + c.T)
        tr = float(np.trace(c))
        lo = float(np.linalg.eigvalsh(c)[0])
        if lo < -PSD_TOL * max(tr, 1.0):
            raise ValueError(f"covariance is not PSD: min eigenvalue {lo:.3e}")
        c.flags.writeable = False
        object.__setattr__(self, "cov", c)

    @property
    def dim(self) -> int:
        return self.cov.shape[0]


@dataclass(frozen=True)
class AffineEstimator:
    """Zero-intercept affine rule mapping observations to estimand coefficients."""

    phi: np.ndarray  # (N, m)

    def coefficients(self, y) -> np.ndarray:
        return self.phi @ np.asarray(y, dtype=float)

    def predict(self, y, basis: SpectralBasis, grid) -> np.ndarray:
        """Field prediction sum_n (phi y)_n e_n(x) on a grid."""
        return evaluate_basis(basis, grid) @ self.coefficients(y)


def _cov(sigma) -> np.ndarray:
    return sigma.cov if isinstance(sigma, JointGaussian) else np.asarray(sigma, dtype=float)


def nominal_covariance(prior: PriorSpectrum, sigma: float, m: int) -> JointGaussian:
    """Block-diagonal nominal covariance diag(kappa_n^2, sigma^2 I_m)."""
    if sigma <= 0.0:
        raise ValueError(f"noise level sigma must be > 0, got {sigma}")
    n = prior.coeff_stds.shape[0]
    c = np.zeros((n + m, n + m))
    c[:n, :n] = np.diag(prior.coeff_stds**2)
    c[n:, n:] = sigma**2 * np.eye(m)
    return JointGaussian(cov=c)


def observation_map(
    basis: SpectralBasis,
    op: SpectralOperator,
    design: DesignPoints,
    target: str = "regression",
) -> ObservationMap:
    """Assemble H[j, n] = t_n e_n(x_j) and the estimand selector.

    ``regression`` estimates the output field (selector diag(t_n)), while
    ``inverse`` recovers the input coefficients (identity selector).
    """
    if design.m == 0:
        raise ValueError("design must contain at least one point")
    E = evaluate_basis(basis, design.xs)
    H = E * op.multipliers
    n, m = basis.n_modes, design.m
    A = np.zeros((n, n + m))
    if target == "regression":
        A[:, :n] = np.diag(op.multipliers)
    elif target == "inverse":
        A[:, :n] = np.eye(n)
    else:
        raise ValueError(f"unknown target {target!r}")
    H.flags.writeable = False
    A.flags.writeable = False
    return ObservationMap(H=H, A_target=A, target=target)


def _gram_factor(cov: np.ndarray, B: np.ndarray):
    """Cholesky factor of K = B cov B^T, raising SingularModelError when unstable."""
    K = B @ cov @ B.T
    K = 0.5 * (K + K.T)
    try:
        return cho_factor(K, lower=True), K
    except np.linalg.LinAlgError as exc:
        raise SingularModelError(
            f"observation Gram matrix is singular (det={np.linalg.det(K):.3e})",
            det=float(np.linalg.det(K)),
        ) from exc


def mmse_value(sigma, obs_map: ObservationMap) -> float:
    """Minimum Bayes risk J = tr(A S A^T) - tr((A S B^T)(B S B^T)^{-1}(B S A^T)).

    This is the integrated posterior variance of the estimand, i.e. the risk
    of the optimal affine rule under the model ``S``.
    """
    S = _cov(sigma)
    A = obs_map.A_target
    prior_term = float(np.sum((A @ S) * A))
    if obs_map.n_obs == 0:
        return prior_term
    B = obs_map.B
    factor, _ = _gram_factor(S, B)
    M = A @ S @ B.T
    X = cho_solve(factor, M.T)
    return prior_term - float(np.sum(M * X.T))


def optimal_affine_estimator(sigma, obs_map: ObservationMap) -> AffineEstimator:
    """Conditional-mean gain Phi = (A S B^T)(B S B^T)^{-1}."""
    S = _cov(sigma)
    if obs_map.n_obs == 0:
        return AffineEstimator(phi=np.zeros((obs_map.n_modes, 0)))
    B = obs_map.B
    factor, _ = _gram_factor(S, B)
    M = obs_map.A_target @ S @ B.T
    phi = cho_solve(factor, M.T).T
    return AffineEstimator(phi=phi)


def affine_risk(estimator: AffineEstimator, sigma, obs_map: ObservationMap) -> float:
    """Bayes risk of an arbitrary affine rule: tr((A - Phi B) S (A - Phi B)^T)."""
    S = _cov(sigma)
    R = obs_map.A_target - estimator.phi @ obs_map.B
    return float(np.sum((R @ S) * R))


def bayes_risk_gradient(sigma, obs_map: ObservationMap) -> np.ndarray:
    """Gradient of J at S: (A - Phi B)^T (A - Phi B) with Phi optimal for S.

    By the envelope theorem the optimal-rule residual map gives the exact
    derivative of the concave value function J.
    """
    S = _cov(sigma)
    est = optimal_affine_estimator(S, obs_map)
    R = obs_map.A_target - est.phi @ obs_map.B
    return R.T @ R


def posterior_coefficient_gaussian(sigma, obs_map: ObservationMap, y=None):
    """Posterior mean and covariance of the estimand coefficients given y.

    The covariance does not depend on the observed values.  With no
    observations the prior moments are returned.
    """
    S = _cov(sigma)
    A = obs_map.A_target
    prior_cov = A @ S @ A.T
    n = obs_map.n_modes
    if obs_map.n_obs == 0:
        return np.zeros(n), 0.5 * (prior_cov + prior_cov.T)
    if y is None:
        y = np.zeros(obs_map.n_obs)
    y = np.asarray(y, dtype=float)
    if y.shape != (obs_map.n_obs,):
        raise ValueError(f"observations must have length {obs_map.n_obs}")
    B = obs_map.B
    factor, _ = _gram_factor(S, B)
    M = A @ S @ B.T
    X = cho_solve(factor, M.T)
    mean = X.T @ y
    cov = prior_cov - M @ X
    return mean, 0.5 * (cov + cov.T)


def signal_block_posterior(sigma, obs_map: ObservationMap, y=None):
    """Posterior mean plus prior/posterior covariance of the signal block.

    Unlike :func:`posterior_coefficient_gaussian` this always conditions the
    first N coordinates, independent of the estimation target.  Returns
    ``(mean, prior_cov, post_cov)``; the mean is zero when ``y`` is omitted.
    """
    S = _cov(sigma)
    n = obs_map.n_modes
    prior = 0.5 * (S[:n, :n] + S[:n, :n].T)
    B = obs_map.B
    factor, _ = _gram_factor(S, B)
    M = S[:n, :] @ B.T
    X = cho_solve(factor, M.T)
    post = prior - M @ X
    mean = np.zeros(n) if y is None else X.T @ np.asarray(y, dtype=float)
    return mean, prior, 0.5 * (post + post.T)


def field_second_moments(coeff_cov: np.ndarray, basis: SpectralBasis, grid) -> np.ndarray:
    """Covariance of the field on a grid: E C E^T with E the basis evaluation."""
    E = evaluate_basis(basis, grid)
    C = np.asarray(coeff_cov, dtype=float)
    return E @ C @ E.T


def sample_paths(coeff_gaussian, basis: SpectralBasis, grid, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` independent field paths on ``grid``; rows are paths.

    Draws use the symmetric PSD square root of the coefficient covariance, so
    a fixed seed gives bit-identical output.
    """
    from .gelbrich import psd_sqrt

    mean, cov = coeff_gaussian
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    tr = max(float(np.trace(cov)), 1.0)
    if float(np.linalg.eigvalsh(0.5 * (cov + cov.T))[0]) < -PSD_TOL * tr:
        raise ValueError("coefficient covariance is not PSD")
    root = psd_sqrt(0.5 * (cov + cov.T))
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((count, mean.shape[0]))
    coeffs = mean + z @ root.T
    return coeffs @ evaluate_basis(basis, grid).T


def marginal_intervals(coeff_gaussian, basis: SpectralBasis, grid):
    """Pointwise 95% intervals mean(x) +/- 1.96 sqrt(var(x)) on a grid."""
    mean, cov = coeff_gaussian
    E = evaluate_basis(basis, grid)
    mean_path = E @ np.asarray(mean, dtype=float)
    var = np.sum((E @ np.asarray(cov, dtype=float)) * E, axis=1)
    half = 1.96 * np.sqrt(np.clip(var, 0.0, None))
    return mean_path - half, mean_path + half
