"""Weighted Gelbrich geometry: feasible set, distance, and the linear oracle.

The feasible set is the ball of centered Gaussian covariances S with

    tr(W S) + tr(W S0) - 2 tr[(sqrt(S0) W S W sqrt(S0))^(1/2)] <= delta^2,

where W is a diagonal weight matrix (per-mode transport costs, noise
coordinates unweighted).  Substituting ``S -> W^(1/2) S W^(1/2)`` turns the
weighted distance into the plain Gelbrich (Bures) distance, which is how the
oracle and all spectral computations are carried out.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGradientError, OracleConvergenceError
from .model import JointGaussian
from .spectral import WeightSequence

__all__ = [
    "GelbrichBall",
    "joint_ball",
    "psd_sqrt",
    "weighted_gelbrich_sq",
    "gelbrich_distance_sq",
    "contains",
    "linear_oracle",
]

_SYM_TOL = 1e-8
_EIG_TOL = 1e-10


@dataclass(frozen=True)
class GelbrichBall:
    """Center covariance, diagonal weights and radius of the transport ball."""

    sigma0: np.ndarray   # (d, d) strictly positive definite center
    weights: np.ndarray  # (d,) strictly positive diagonal of W
    delta: float         # radius, same units as the square-root cost

    def __post_init__(self):
        s0 = np.asarray(self.sigma0, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if s0.ndim != 2 or s0.shape[0] != s0.shape[1]:
            raise ValueError(f"center covariance must be square, got {s0.shape}")
        if w.shape != (s0.shape[0],):
            raise ValueError("weights must be a vector matching the covariance size")
        if np.any(w <= 0.0):
            raise ValueError("weights must be strictly positive")
        if self.delta < 0.0:
            raise ValueError(f"radius must be >= 0, got {self.delta}")
        s0 = 0.5 * (s0 + s0.T)
        if float(np.linalg.eigvalsh(s0)[0]) <= 0.0:
            raise ValueError("center covariance must be strictly positive definite")
        s0.flags.writeable = False
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "sigma0", s0)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.sigma0.shape[0]


def joint_ball(sigma0: JointGaussian, weights: WeightSequence, n_obs: int, delta: float) -> GelbrichBall:
    """Ball on the joint coefficient-plus-noise space.

    Signal coordinates carry the roughness weights, noise coordinates are
    unweighted (cost 1).
    """
    w = np.concatenate([weights.weights, np.ones(n_obs)])
    return GelbrichBall(sigma0=sigma0.cov, weights=w, delta=float(delta))


def psd_sqrt(mat: np.ndarray) -> np.ndarray:
    """Unique symmetric PSD square root via eigendecomposition.

    Eigenvalues below zero (roundoff) are clipped; genuinely asymmetric or
    indefinite input is rejected.
    """
    m = np.asarray(mat, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got {m.shape}")
    scale = max(float(np.abs(m).max()), 1.0)
    if float(np.abs(m - m.T).max()) > _SYM_TOL * scale:
        raise ValueError("matrix must be symmetric")
    sym = 0.5 * (m + m.T)
    evals, vecs = np.linalg.eigh(sym)
    tr = max(float(np.trace(sym)), 1.0)
    if evals[0] < -_EIG_TOL * tr:
        raise ValueError(f"matrix is not PSD: min eigenvalue {evals[0]:.3e}")
    root = vecs * np.sqrt(np.clip(evals, 0.0, None))
    return root @ vecs.T


def _weighted_center_sqrt(ball: "GelbrichBall") -> np.ndarray:
    """PSD square root of W^(1/2) Sigma0 W^(1/2), cached on the ball."""
    root = getattr(ball, "_wcs_cache", None)
    if root is None:
        sw = np.sqrt(ball.weights)
        root = psd_sqrt(ball.sigma0 * np.outer(sw, sw))
        object.__setattr__(ball, "_wcs_cache", root)
    return root


def weighted_gelbrich_sq(a: np.ndarray, b: np.ndarray, weights: np.ndarray) -> float:
    """Squared weighted Gelbrich distance between two PSD covariances."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    w = np.asarray(weights, dtype=float)
    if a.shape != b.shape or a.shape[0] != w.shape[0]:
        raise ValueError("covariances and weights must have matching dimensions")
    sw = np.sqrt(w)
    sa = a * np.outer(sw, sw)
    sb = b * np.outer(sw, sw)
    rb = psd_sqrt(sb)
    cross = np.linalg.eigvalsh(rb @ sa @ rb)
    cross_tr = float(np.sum(np.sqrt(np.clip(cross, 0.0, None))))
    d2 = float(np.trace(sa)) + float(np.trace(sb)) - 2.0 * cross_tr
    return max(d2, 0.0)


def gelbrich_distance_sq(sigma, ball: GelbrichBall) -> float:
    """Squared distance of a covariance to the ball center."""
    s = sigma.cov if isinstance(sigma, JointGaussian) else np.asarray(sigma, dtype=float)
    if s.shape != ball.sigma0.shape:
        raise ValueError(f"covariance shape {s.shape} does not match ball dimension")
    sw = np.sqrt(ball.weights)
    sa = s * np.outer(sw, sw)
    sb = ball.sigma0 * np.outer(sw, sw)
    rb = _weighted_center_sqrt(ball)
    cross = np.linalg.eigvalsh(rb @ sa @ rb)
    cross_tr = float(np.sum(np.sqrt(np.clip(cross, 0.0, None))))
    return max(float(np.trace(sa)) + float(np.trace(sb)) - 2.0 * cross_tr, 0.0)


def contains(sigma, ball: GelbrichBall, tol: float = 0.0) -> bool:
    """Closed-ball membership up to an additive tolerance on the squared distance."""
    return gelbrich_distance_sq(sigma, ball) <= ball.delta**2 + tol


def linear_oracle(direction: np.ndarray, ball: GelbrichBall, bisect_tol: float = 1e-10,
                  debug: bool = False):
    """Maximize <D, S> over the ball; returns (maximizer, dual parameter).

    After the weight substitution the candidate family is

        S(gamma) = gamma^2 (gamma I - Dt)^(-1) S0 (gamma I - Dt)^(-1),

    the covariance of the optimal affine push-forward of the center, with
    ``Dt`` the weight-whitened direction.  Its squared distance to the center
    reduces to ``h(gamma) = sum_i s_i d_i^2 / (gamma - d_i)^2`` in the
    eigenbasis of Dt, which is continuous and strictly decreasing for
    ``gamma > max_i d_i``; bisection finds the radius-saturating gamma.
    """
    d = np.asarray(direction, dtype=float)
    if d.shape != ball.sigma0.shape:
        raise ValueError(f"direction shape {d.shape} does not match ball dimension")
    d = 0.5 * (d + d.T)
    if float(np.abs(d).max()) == 0.0:
        raise DegenerateGradientError("linear oracle called with a zero direction")
    if ball.delta <= 0.0:
        raise ValueError("linear oracle requires a strictly positive radius")

    sw = np.sqrt(ball.weights)
    s0 = ball.sigma0 * np.outer(sw, sw)
    dt = d / np.outer(sw, sw)
    evals, vecs = np.linalg.eigh(dt)
    s0v = s0 @ vecs
    s_diag = np.sum(vecs * s0v, axis=0)
    num = s_diag * evals**2
    delta_sq = ball.delta**2

    def h(gamma: float) -> float:
        return float(np.sum(num / (gamma - evals) ** 2))

    top = float(evals[-1])
    lower = top * (1.0 + 1e-12) + 1e-12
    if h(lower) < delta_sq:
        raise OracleConvergenceError(
            "radius saturation point lies inside the bracket guard; "
            "the budget is too large for this direction"
        )
    offset = 1.0
    doublings = 0
    while h(lower + offset) >= delta_sq:
        offset *= 2.0
        doublings += 1
        if doublings > 200:
            raise OracleConvergenceError("failed to bracket the dual parameter")
    if debug:
        probes = np.linspace(lower, lower + offset, 12)[1:-1]
        vals = [h(g) for g in probes]
        if np.any(np.diff(vals) >= 0.0):
            raise OracleConvergenceError("distance is not decreasing on the bracket")

    lo, hi = lower, lower + offset
    gamma = hi
    converged = False
    for _ in range(500):
        gamma = 0.5 * (lo + hi)
        val = h(gamma)
        if abs(val - delta_sq) <= bisect_tol:
            converged = True
            break
        if val > delta_sq:
            lo = gamma
        else:
            hi = gamma
    if not converged:
        raise OracleConvergenceError(
            f"bisection stalled: |distance^2 - delta^2| = {abs(val - delta_sq):.3e}"
        )

    fac = gamma / (gamma - evals)
    core = (vecs.T @ s0v) * np.outer(fac, fac)
    s_star = vecs @ core @ vecs.T
    sigma_star = s_star / np.outer(sw, sw)
    return 0.5 * (sigma_star + sigma_star.T), float(gamma)
