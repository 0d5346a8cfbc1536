"""Diagonal forward operators acting by multipliers on basis coefficients."""

from dataclasses import dataclass

import numpy as np

from .spectral import SpectralBasis

__all__ = ["SpectralOperator", "make_operator", "apply_to_coefficients"]

# Multipliers below this are indistinguishable from an unobservable mode and
# only produce denormal noise downstream.
_UNDERFLOW_FLOOR = 1e-300


@dataclass(frozen=True)
class SpectralOperator:
    """Forward map T e_n = t_n e_n with multipliers t_n."""

    kind: str
    multipliers: np.ndarray
    heat_time: float | None = None


def make_operator(kind: str, basis: SpectralBasis, heat_time: float | None = None) -> SpectralOperator:
    """Build one of the supported diagonal operators.

    ``identity`` has t_n = 1, ``inverse_laplacian`` has t_n = -1/lambda_n and
    ``heat`` has t_n = exp(-lambda_n t) for a fixed time t >= 0.
    """
    if kind == "identity":
        t = np.ones(basis.n_modes)
    elif kind == "inverse_laplacian":
        t = -1.0 / basis.lambdas
    elif kind == "heat":
        if heat_time is None:
            raise ValueError("heat operator requires heat_time")
        if heat_time < 0.0:
            raise ValueError(f"heat_time must be >= 0, got {heat_time}")
        t = np.exp(-basis.lambdas * heat_time)
        t[np.abs(t) < _UNDERFLOW_FLOOR] = 0.0
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    t.flags.writeable = False
    ht = float(heat_time) if kind == "heat" else None
    return SpectralOperator(kind=kind, multipliers=t, heat_time=ht)


def apply_to_coefficients(op: SpectralOperator, coeffs) -> np.ndarray:
    """Apply the operator mode-wise: output_n = t_n * coeffs_n."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[-1] != op.multipliers.shape[0]:
        raise ValueError(
            f"coefficient length {coeffs.shape[-1]} does not match "
            f"operator size {op.multipliers.shape[0]}"
        )
    return op.multipliers * coeffs
