"""Covariance comparison metrics and derived experiment quantities."""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .model import ObservationMap, signal_block_posterior

__all__ = [
    "DistanceReport",
    "foerstner_distance",
    "prior_posterior_distance",
    "correlation_from_covariance",
]

_PD_FLOOR = 1e-14
# Relative eigenvalue floor below which a prior direction is numerically
# indistinguishable from zero variance and is excluded from the metric.
GRADED_FLOOR = 1e-14


@dataclass(frozen=True)
class DistanceReport:
    """Prior-to-posterior distances under the nominal and worst-case models."""

    nominal: float
    worst_case: float
    config_label: str = ""


def foerstner_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Affine-invariant geodesic distance between symmetric PD matrices.

    Equals ``sqrt(sum_i ln^2 mu_i)`` over the generalized eigenvalues of the
    pencil (a, b), computed via a Cholesky-based symmetric eigensolve.  Both
    arguments must be strictly positive definite.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("inputs must be square matrices of equal shape")
    a = 0.5 * (a + a.T)
    b = 0.5 * (b + b.T)
    for name, mat in (("first", a), ("second", b)):
        evals = np.linalg.eigvalsh(mat)
        if evals[0] <= _PD_FLOOR * max(float(np.trace(mat)), 0.0):
            raise ValueError(f"{name} argument is numerically singular")
    mu = eigh(a, b, eigvals_only=True)
    return float(np.sqrt(np.sum(np.log(mu) ** 2)))


def prior_posterior_distance(sigma, obs_map: ObservationMap,
                             rel_floor: float = GRADED_FLOOR) -> float:
    """Distance between the signal-block prior and posterior covariance.

    Very smooth priors are numerically rank deficient: trailing coefficient
    variances underflow the working precision relative to the leading ones.
    Directions whose prior eigenvalue falls below ``rel_floor`` times the
    largest are excluded before the metric is evaluated; the data cannot
    inform them, so their prior and posterior agree and they contribute
    nothing to the distance.  Within the kept subspace the posterior may
    still be nearly explained in a few directions; their generalized
    eigenvalues are clipped away from zero instead of rejected, since a
    conditioning step cannot drive them negative exactly.
    """
    _, prior, post = signal_block_posterior(sigma, obs_map)
    evals, vecs = np.linalg.eigh(prior)
    keep = evals >= rel_floor * float(evals[-1])
    if not np.all(keep):
        basis = vecs[:, keep]
        prior = basis.T @ prior @ basis
        post = basis.T @ post @ basis
    mu = eigh(0.5 * (post + post.T), 0.5 * (prior + prior.T), eigvals_only=True)
    return float(np.sqrt(np.sum(np.log(np.clip(mu, 1e-300, None)) ** 2)))


def correlation_from_covariance(cov: np.ndarray) -> np.ndarray:
    """Correlation matrix R[i,j] = C[i,j] / sqrt(C[i,i] C[j,j])."""
    c = np.asarray(cov, dtype=float)
    d = np.diag(c)
    if np.any(d <= 0.0):
        raise ValueError("covariance diagonal must be strictly positive")
    scale = 1.0 / np.sqrt(d)
    r = c * np.outer(scale, scale)
    np.fill_diagonal(r, 1.0)
    return r
