"""Frank-Wolfe computation of the worst-case covariance and robust estimator.

The adversary maximizes the concave Bayes-risk value function J over the
transport ball; the decision-maker's best response is the conditional-mean
gain at the maximizer.  Each iteration linearizes J at the current iterate,
calls the ball's linear oracle and takes a line-search step toward the
oracle point.  By concavity the linearized gap upper-bounds the remaining
suboptimality, so it doubles as the stopping criterion.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DegenerateGradientError, SingularModelError
from .gelbrich import GelbrichBall, gelbrich_distance_sq, linear_oracle
from .model import (
    AffineEstimator,
    JointGaussian,
    ObservationMap,
    mmse_value,
    optimal_affine_estimator,
)

__all__ = [
    "SolverConfig",
    "EquilibriumResult",
    "solve_equilibrium",
    "invertibility_guard",
    "determinant_diagnostic",
    "DeterminantReport",
    "truncation_convergence",
    "TruncationReport",
]

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters of the Frank-Wolfe loop.

    ``line_search`` is either ``golden_section`` (exact 1-D maximization of
    the concave restriction, ``golden_iters`` shrinks) or ``fixed`` (the
    classical 2/(k+2) schedule).  The stagnation guard stops the loop when
    the relative value change over ``stagnation_window`` iterations falls
    below ``stagnation_rtol``.
    """

    max_iters: int = 2000
    gap_tol: float = 1e-7
    bisect_tol: float = 1e-10
    line_search: str = "golden_section"
    golden_iters: int = 60
    record_trace: bool = False
    stagnation_window: int = 10
    stagnation_rtol: float = 1e-12
    feasibility_tol: float = 1e-6

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        for name in ("gap_tol", "bisect_tol", "stagnation_rtol", "feasibility_tol"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.line_search not in ("golden_section", "fixed"):
            raise ValueError(f"unknown line_search {self.line_search!r}")
        if self.golden_iters < 1:
            raise ValueError("golden_iters must be >= 1")


@dataclass(frozen=True)
class EquilibriumResult:
    """Worst-case covariance, robust estimator and solve diagnostics."""

    sigma_star: JointGaussian
    estimator: AffineEstimator
    value: float
    gap: float
    iterations: int
    det_K_eps: float
    distance_sq: float
    n_modes: int
    n_obs: int
    stop_reason: str
    config: SolverConfig
    trace: list | None = None


def invertibility_guard(sigma, obs_map: ObservationMap, floor: float | None = None) -> bool:
    """True iff the observation Gram matrix clears the eigenvalue floor.

    The default floor is relative: ``1e-12 * trace(B S B^T)``.
    """
    s = sigma.cov if isinstance(sigma, JointGaussian) else np.asarray(sigma, dtype=float)
    B = obs_map.B
    K = B @ s @ B.T
    K = 0.5 * (K + K.T)
    if floor is None:
        floor = 1e-12 * float(np.trace(K))
    return bool(np.linalg.eigvalsh(K)[0] >= floor)


def _value_phi_grad(S, A, B, tr_A):
    """One-factorization evaluation of (J, Phi, grad J) at a covariance."""
    K = B @ S @ B.T
    K = 0.5 * (K + K.T)
    try:
        factor = cho_factor(K, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularModelError(
            f"observation Gram matrix became singular (det={np.linalg.det(K):.3e})",
            det=float(np.linalg.det(K)),
        ) from exc
    M = A @ S @ B.T
    X = cho_solve(factor, M.T)
    value = tr_A(S) - float(np.sum(M * X.T))
    phi = X.T
    R = A - phi @ B
    return value, phi, R.T @ R


def _segment_value(eta, K0, K1, M0, M1, t0, t1):
    """J along the segment S + eta * (S_hat - S) using cached linear pieces."""
    K = K0 + eta * K1
    try:
        factor = cho_factor(0.5 * (K + K.T), lower=True)
    except np.linalg.LinAlgError:
        return -np.inf
    M = M0 + eta * M1
    X = cho_solve(factor, M.T)
    return t0 + eta * t1 - float(np.sum(M * X.T))


def _golden_step(j_eta, value_at_zero, iters):
    """Golden-section maximization of a concave function on [0, 1]."""
    lo, hi = 0.0, 1.0
    c1 = hi - _INVPHI * (hi - lo)
    c2 = lo + _INVPHI * (hi - lo)
    f1, f2 = j_eta(c1), j_eta(c2)
    for _ in range(iters):
        if f1 < f2:
            lo = c1
            c1, f1 = c2, f2
            c2 = lo + _INVPHI * (hi - lo)
            f2 = j_eta(c2)
        else:
            hi = c2
            c2, f2 = c1, f1
            c1 = hi - _INVPHI * (hi - lo)
            f1 = j_eta(c1)
    eta = 0.5 * (lo + hi)
    candidates = [(j_eta(eta), eta), (j_eta(1.0), 1.0), (value_at_zero, 0.0)]
    return max(candidates)[1]


def solve_equilibrium(ball: GelbrichBall, obs_map: ObservationMap,
                      config: SolverConfig | None = None) -> EquilibriumResult:
    """Compute the equilibrium pair of the covariance game over the ball.

    Iterates stay feasible (the ball is convex and the oracle returns ball
    points), ascend monotonically under golden-section search, and stop when
    the Frank-Wolfe gap drops below ``gap_tol``, on stagnation, or at
    ``max_iters``.
    """
    config = config or SolverConfig()
    n, m = obs_map.n_modes, obs_map.n_obs
    if ball.dim != n + m:
        raise ValueError(f"ball dimension {ball.dim} does not match model {n + m}")
    if not invertibility_guard(ball.sigma0, obs_map):
        raise SingularModelError(
            "nominal observation Gram matrix fails the invertibility guard",
            det=float(np.linalg.det(obs_map.B @ ball.sigma0 @ obs_map.B.T)),
        )

    A = obs_map.A_target
    B = obs_map.B

    def tr_A(S):
        return float(np.sum((A @ S) * A))

    S = ball.sigma0.copy()
    trace_rows = [] if config.record_trace else None
    values = []
    gap = np.inf
    stop_reason = "max_iters"
    k = 0
    for k in range(config.max_iters):
        value, phi, grad = _value_phi_grad(S, A, B, tr_A)
        values.append(value)

        dist_sq = gelbrich_distance_sq(S, ball)
        if dist_sq > ball.delta**2 + config.feasibility_tol:
            raise RuntimeError(
                f"iterate left the feasible set: distance^2 {dist_sq:.3e} "
                f"exceeds budget {ball.delta**2:.3e}"
            )

        try:
            s_hat, _gamma = linear_oracle(grad, ball, config.bisect_tol)
        except DegenerateGradientError:
            gap = 0.0
            stop_reason = "gap_tol"
            if trace_rows is not None:
                trace_rows.append((value, gap))
            break

        delta_dir = s_hat - S
        gap = float(np.sum(grad * delta_dir))
        if trace_rows is not None:
            trace_rows.append((value, gap))
        if gap <= config.gap_tol:
            stop_reason = "gap_tol"
            break

        if config.line_search == "fixed":
            eta = 2.0 / (k + 2.0)
        else:
            K0 = B @ S @ B.T
            K1 = B @ delta_dir @ B.T
            M0 = A @ S @ B.T
            M1 = A @ delta_dir @ B.T
            t0, t1 = tr_A(S), tr_A(delta_dir)
            eta = _golden_step(
                lambda e: _segment_value(e, K0, K1, M0, M1, t0, t1), value,
                config.golden_iters,
            )
            if eta == 0.0:
                stop_reason = "stagnation"
                break

        S = S + eta * delta_dir
        S = 0.5 * (S + S.T)

        w = config.stagnation_window
        if len(values) > w:
            scale = max(abs(values[-1]), 1e-300)
            if (values[-1] - values[-1 - w]) / scale < config.stagnation_rtol:
                stop_reason = "stagnation"
                break

    sigma_star = JointGaussian(cov=S)
    estimator = optimal_affine_estimator(sigma_star, obs_map)
    value = mmse_value(sigma_star, obs_map)
    K = B @ S @ B.T
    det = float(np.linalg.det(0.5 * (K + K.T)))
    return EquilibriumResult(
        sigma_star=sigma_star,
        estimator=estimator,
        value=value,
        gap=float(gap),
        iterations=k + 1,
        det_K_eps=det,
        distance_sq=gelbrich_distance_sq(sigma_star, ball),
        n_modes=n,
        n_obs=m,
        stop_reason=stop_reason,
        config=config,
        trace=trace_rows,
    )


@dataclass(frozen=True)
class DeterminantReport:
    """Observation-Gram determinants across truncation levels.

    ``decaying`` flags a monotone decrease by more than an order of
    magnitude, the signature of a model losing its noise floor as modes are
    added; otherwise the sequence is reported as stabilized.
    """

    levels: tuple
    dets: tuple
    decaying: bool

    DECAY_RATIO = 0.1


def determinant_diagnostic(entries) -> DeterminantReport:
    """Classify det(K_eps) across increasing truncation levels.

    ``entries`` is a sequence of (n_modes, det) pairs or of
    :class:`EquilibriumResult`.  At least two levels are required.
    """
    pairs = []
    for e in entries:
        if isinstance(e, EquilibriumResult):
            pairs.append((e.n_modes, e.det_K_eps))
        else:
            n, det = e
            pairs.append((int(n), float(det)))
    if len(pairs) < 2:
        raise ValueError("determinant diagnostic needs at least two truncation levels")
    pairs.sort()
    levels = tuple(p[0] for p in pairs)
    dets = tuple(p[1] for p in pairs)
    monotone = all(b < a for a, b in zip(dets, dets[1:]))
    decaying = monotone and dets[-1] < DeterminantReport.DECAY_RATIO * dets[0]
    return DeterminantReport(levels=levels, dets=dets, decaying=decaying)


@dataclass(frozen=True)
class TruncationReport:
    """Game values across truncation levels with relative increments."""

    levels: tuple
    values: tuple
    rel_increments: tuple


def truncation_convergence(results) -> TruncationReport:
    """Tabulate game values of solves that differ only in truncation level."""
    pairs = sorted((r.n_modes, r.value) for r in results)
    if len(pairs) < 1:
        raise ValueError("truncation report needs at least one solve")
    levels = tuple(p[0] for p in pairs)
    values = tuple(p[1] for p in pairs)
    incs = tuple(
        abs(b - a) / max(abs(b), 1e-300) for a, b in zip(values, values[1:])
    )
    return TruncationReport(levels=levels, values=values, rel_increments=incs)
