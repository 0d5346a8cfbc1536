"""Dirichlet-Laplacian spectral basis on [0, 1] and derived sequences.

The basis diagonalizes every operator in :mod:`drgp.operators`, so priors,
transport weights and forward maps are all plain sequences indexed by mode.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpectralBasis",
    "PriorSpectrum",
    "WeightSequence",
    "build_dirichlet_basis_1d",
    "evaluate_basis",
    "matern_coefficients",
    "roughness_weights",
]


@dataclass(frozen=True)
class SpectralBasis:
    """First ``n_modes`` eigenpairs of the Dirichlet Laplacian on [0, 1]."""

    n_modes: int
    lambdas: np.ndarray
    interval: tuple[float, float] = (0.0, 1.0)


@dataclass(frozen=True)
class PriorSpectrum:
    """Coefficient standard deviations (kappa^2 + lambda_n)^(-alpha/2)."""

    alpha: float
    kappa: float
    coeff_stds: np.ndarray


@dataclass(frozen=True)
class WeightSequence:
    """Per-mode transport cost weights lambda_n^beta."""

    beta: float
    weights: np.ndarray


def build_dirichlet_basis_1d(n_modes: int) -> SpectralBasis:
    """Return the basis with eigenvalues lambda_n = n^2 pi^2, n = 1..n_modes."""
    if n_modes < 1:
        raise ValueError(f"n_modes must be >= 1, got {n_modes}")
    n = np.arange(1, n_modes + 1, dtype=float)
    lambdas = (n * np.pi) ** 2
    lambdas.flags.writeable = False
    return SpectralBasis(n_modes=int(n_modes), lambdas=lambdas)


def evaluate_basis(basis: SpectralBasis, xs) -> np.ndarray:
    """Evaluate e_n(x) = sqrt(2) sin(n pi x) on a grid.

    Returns an array of shape ``(len(xs), n_modes)``.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    lo, hi = basis.interval
    if np.any(xs < lo) or np.any(xs > hi):
        raise ValueError("evaluation points must lie in [0, 1]")
    n = np.arange(1, basis.n_modes + 1, dtype=float)
    return np.sqrt(2.0) * np.sin(np.outer(xs, n * np.pi))


def matern_coefficients(basis: SpectralBasis, alpha: float, kappa: float = 0.0) -> PriorSpectrum:
    """Matern-type prior spectrum kappa_n = (kappa^2 + lambda_n)^(-alpha/2).

    Requires ``alpha > 1/2`` (square-summability on a 1-D domain) and
    ``kappa >= 0``.
    """
    if alpha <= 0.5:
        raise ValueError(f"alpha must exceed 1/2, got {alpha}")
    if kappa < 0.0:
        raise ValueError(f"kappa must be >= 0, got {kappa}")
    stds = (kappa**2 + basis.lambdas) ** (-alpha / 2.0)
    stds.flags.writeable = False
    return PriorSpectrum(alpha=float(alpha), kappa=float(kappa), coeff_stds=stds)


def roughness_weights(basis: SpectralBasis, beta: float) -> WeightSequence:
    """Transport weights w_n = lambda_n^beta, increasing, beta > 1/2."""
    if beta <= 0.5:
        raise ValueError(f"beta must exceed 1/2, got {beta}")
    w = basis.lambdas**beta
    w.flags.writeable = False
    return WeightSequence(beta=float(beta), weights=w)
