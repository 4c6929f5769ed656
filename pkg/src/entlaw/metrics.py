"""Fidelity, normalized trace distance and sine distance."""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError, InvalidStateError, NumericalFailure
from .linalg import HermitianOperator, as_operator, hermitian_eig, trace_norm

__all__ = ["fidelity", "sine_distance", "trace_distance"]

_STATE_TOL = 1e-10
_RANGE_TOL = 1e-9
_RANK_TOL = 1e-12
# eigenvalues this far below the largest are rounding noise; their square
# roots (~1e-8) would otherwise leak into the fidelity
_NOISE_REL = 64 * np.finfo(float).eps


def _check_state(x: HermitianOperator, name: str):
    e = hermitian_eig(x)
    w = e.values
    if w.size and w[-1] < -_STATE_TOL:
        raise InvalidStateError(f"{name} is not PSD (min eigenvalue {w[-1]:.3e})")
    if x.trace() > 1.0 + _STATE_TOL:
        raise InvalidStateError(f"{name} has trace {x.trace():.12g} > 1")
    return e


def _rank_one(e):
    w = e.values
    return w.size > 0 and w[0] > 0 and (w.size == 1 or w[1] <= _RANK_TOL * w[0])


def _same_dim(a, b):
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def _clamp_unit(raw: float, what: str) -> float:
    if raw < -_RANGE_TOL or raw > 1.0 + _RANGE_TOL:
        raise NumericalFailure(f"{what} = {raw!r} outside [0, 1]", residual=raw)
    return min(max(raw, 0.0), 1.0)


def _sqrt_denoised(e) -> np.ndarray:
    w = e.values
    root = np.sqrt(np.where(w > _NOISE_REL * w[0], w, 0.0))
    return (e.vectors * root) @ e.vectors.conj().T


def fidelity(omega, tau) -> float:
    """Uhlmann fidelity ``||sqrt(omega) sqrt(tau)||_1**2``.

    The nuclear norm of ``X = sqrt(omega) sqrt(tau)`` is read off the
    Hermitian dilation ``[[0, X], [X^H, 0]]``, whose eigenvalues are the
    singular values of ``X`` and their negatives. Unlike
    ``Tr sqrt(sqrt(omega) tau sqrt(omega))`` this never takes the square root
    of rounding noise in a rank-deficient spectrum. If either argument is rank
    one, ``lam <v|other|v>`` is used instead, which is exact. Eigenvalues
    below ``64 * machine_eps * lambda_max`` count as zero.
    """
    omega = as_operator(omega)
    tau = as_operator(tau)
    _same_dim(omega, tau)
    eo = _check_state(omega, "omega")
    et = _check_state(tau, "tau")
    for e, other in ((et, omega), (eo, tau)):
        if _rank_one(e):
            v = e.vectors[:, 0]
            raw = float(e.values[0]) * float(np.vdot(v, other.data @ v).real)
            return _clamp_unit(raw, "fidelity")
    x = _sqrt_denoised(eo) @ _sqrt_denoised(et)
    n = omega.dim
    dil = np.zeros((2 * n, 2 * n), dtype=complex)
    dil[:n, n:] = x
    dil[n:, :n] = x.conj().T
    nuclear = 0.5 * float(np.sum(np.abs(hermitian_eig(HermitianOperator(dil)).values)))
    return _clamp_unit(nuclear * nuclear, "fidelity")


def trace_distance(omega, tau) -> float:
    """Normalized trace distance ``(1/2) ||omega - tau||_1``."""
    omega = as_operator(omega)
    tau = as_operator(tau)
    _same_dim(omega, tau)
    return 0.5 * trace_norm(HermitianOperator(omega.data - tau.data))


def sine_distance(omega, tau) -> float:
    """``sqrt(1 - F(omega, tau))``."""
    return math.sqrt(max(0.0, 1.0 - fidelity(omega, tau)))
