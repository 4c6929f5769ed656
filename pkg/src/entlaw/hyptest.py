"""Hypothesis testing relative entropy

    D_H^eps(omega || tau) = -log2 min { Tr[L tau] : 0 <= L <= I, Tr[L omega] = 1 - eps }

computed three independent ways: a quantum Neyman-Pearson test found by
bisection (the primary path), an exact fractional-knapsack oracle for
commuting inputs, and an SDP solved with :mod:`entlaw.sdp`.

For ``mu >= 0`` the operator ``L = P_+(omega - mu tau) + t P_0(omega - mu tau)``
is optimal for its own type-I level, and both ``Tr[L omega]`` and
``Tr[L tau]`` are nonincreasing in ``mu``. The equality constraint is
therefore met by bisecting on ``mu`` and filling the boundary eigenspace
``P_0`` with weight ``t``. Since ``mu >= 0`` the same ``L`` also solves the
inequality-constrained problem ``Tr[L omega] >= 1 - eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import DimensionError, DomainError, InvalidStateError, NumericalFailure
from .linalg import DEGENERACY_TOL, PSD_TOL, HermitianOperator, as_operator, hermitian_eig
from .sdp import ProblemBuilder, SdpProblem, SdpSolution, complex_embed, hermitian_basis, solve

__all__ = [
    "HypothesisTestResult",
    "dh_lp_oracle",
    "dh_neyman_pearson",
    "dh_sdp",
    "dh_sdp_program",
    "dh_sdp_solve",
]

INF = math.inf
TYPE1_TOL = 1e-9
STATE_TRACE_TOL = 1e-8
MAX_BISECTIONS = 200
# Tr[P_+ omega] also moves continuously between eigenvalue crossings, so the
# target can be met without any boundary eigenspace; accept within this.
ACCEPT_TOL = 1e-11


@dataclass(frozen=True)
class HypothesisTestResult:
    """Optimal test for ``D_H^eps(omega || tau)``.

    ``value_bits`` is ``math.inf`` when a test of zero type-II cost exists.
    ``threshold_mu`` and ``boundary_weight`` are the Neyman-Pearson
    parameters; both are ``nan`` for the closed-form special cases.
    """

    value_bits: float
    optimal_test: HermitianOperator
    threshold_mu: float
    boundary_weight: float
    achieved_type1: float
    type2: float

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value_bits)


def _bits(type2: float) -> float:
    return INF if type2 <= 0.0 else -math.log2(type2)


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"eps must lie in [0, 1], got {eps}")
    return eps


def _check_inputs(omega, tau) -> Tuple[HermitianOperator, HermitianOperator]:
    omega = as_operator(omega)
    tau = as_operator(tau)
    if omega.dim != tau.dim:
        raise DimensionError(f"dimension mismatch: {omega.dim} vs {tau.dim}")
    w = hermitian_eig(omega).values
    if w[-1] < -PSD_TOL or abs(omega.trace() - 1.0) > STATE_TRACE_TOL:
        raise InvalidStateError("omega must be a density operator")
    t = hermitian_eig(tau).values
    if t[-1] < -PSD_TOL * max(1.0, t[0]):
        raise InvalidStateError(f"tau is not PSD (min eigenvalue {t[-1]:.3e})")
    return omega, tau


def _result(lam: np.ndarray, omega, tau, mu, t) -> HypothesisTestResult:
    type1 = float(np.vdot(lam, omega.data).real)
    type2 = max(0.0, float(np.vdot(lam, tau.data).real))
    return HypothesisTestResult(_bits(type2), HermitianOperator(lam, omega.dims), mu, t, type1, type2)


def dh_neyman_pearson(omega, tau, eps: float) -> HypothesisTestResult:
    """``D_H^eps(omega || tau)`` in bits from the Neyman-Pearson test.

    Parameters
    ----------
    omega : state
        Density operator (unit trace).
    tau : PSD operator
        Need not be normalized.
    eps : float
        Type-I error in ``[0, 1]``.

    Returns
    -------
    HypothesisTestResult
        ``achieved_type1`` equals ``1 - eps`` to within ``1e-9``.

    Notes
    -----
    ``eps = 1`` and ``tau = 0`` give ``+inf``. ``eps = 0`` uses the support
    projector of ``omega`` directly. If the weight of ``omega`` outside
    ``supp(tau)`` already reaches ``1 - eps`` the test can live on
    ``ker(tau)`` and the value is ``+inf``.
    """
    eps = _check_eps(eps)
    omega, tau = _check_inputs(omega, tau)
    n = omega.dim
    target = 1.0 - eps
    nan = math.nan

    if eps == 1.0:
        return _result(np.zeros((n, n), dtype=complex), omega, tau, nan, nan)
    te = hermitian_eig(tau)
    tscale = max(1.0, float(te.values[0]))
    if te.values[0] <= PSD_TOL:
        return HypothesisTestResult(INF, HermitianOperator(target * np.eye(n), omega.dims), nan, nan, target, 0.0)
    if eps == 0.0:
        oe = hermitian_eig(omega)
        return _result(oe.projector(oe.values > DEGENERACY_TOL), omega, tau, nan, nan)

    ker = te.projector(te.values <= PSD_TOL * tscale)
    w_out = float(np.vdot(ker, omega.data).real)
    if w_out >= target:
        lam = (target / w_out) * ker
        res = _result(lam, omega, tau, INF, nan)
        return HypothesisTestResult(INF, res.optimal_test, INF, nan, res.achieved_type1, 0.0)

    def split(mu):
        e = hermitian_eig(HermitianOperator(omega.data - mu * tau.data))
        tie = DEGENERACY_TOL * max(1.0, float(np.max(np.abs(e.values))))
        pos = e.values > tie
        bnd = np.abs(e.values) <= tie
        p_pos = e.projector(pos)
        p_bnd = e.projector(bnd)
        f = float(np.vdot(p_pos, omega.data).real)
        g = f + float(np.vdot(p_bnd, omega.data).real)
        return p_pos, p_bnd, f, g

    lo = 0.0
    positive = te.values[te.values > PSD_TOL * tscale]
    hi = float(hermitian_eig(omega).values[0]) / float(positive[-1]) + 1.0
    for _ in range(2000):
        if split(hi)[3] < target:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NumericalFailure("could not bracket the Neyman-Pearson threshold", residual=hi)

    for _ in range(MAX_BISECTIONS):
        mu = 0.5 * (lo + hi)
        p_pos, p_bnd, f, g = split(mu)
        if f > target + ACCEPT_TOL:
            lo = mu
        elif g < target - ACCEPT_TOL:
            hi = mu
        else:
            t = 0.0 if g - f <= 0.0 else min(1.0, max(0.0, (target - f) / (g - f)))
            res = _result(p_pos + t * p_bnd, omega, tau, mu, t)
            miss = abs(res.achieved_type1 - target)
            if miss > TYPE1_TOL:
                raise NumericalFailure(f"type-I constraint missed by {miss:.3e}", residual=miss)
            return res
        if hi - lo <= 1e-300:
            break
    raise NumericalFailure(
        f"bisection did not converge within {MAX_BISECTIONS} iterations", residual=hi - lo
    )


def dh_lp_oracle(p, q, eps: float) -> float:
    """``D_H^eps`` for commuting inputs ``diag(p)``, ``diag(q)`` in bits.

    The linear program ``min q.l s.t. p.l = 1 - eps, 0 <= l <= 1`` is a
    fractional knapsack: fill indices in decreasing order of ``p_i / q_i``.

    >>> dh_lp_oracle([1.0, 0.0], [0.25, 0.75], 0.0)
    2.0
    """
    eps = _check_eps(eps)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise DimensionError("p and q must be vectors of equal length")
    if np.any(p < 0) or abs(p.sum() - 1.0) > STATE_TRACE_TOL:
        raise DomainError("p must be a probability vector")
    if np.any(q < 0):
        raise DomainError("q must be entrywise nonnegative")
    if eps == 1.0:
        return INF
    idx = [i for i in range(p.size) if p[i] > 0.0]
    # decreasing p/q, with q = 0 first
    idx.sort(key=lambda i: (q[i] > 0.0, q[i] / p[i]))
    need = 1.0 - eps
    cost = 0.0
    for i in idx:
        if need <= 0.0:
            break
        take = min(1.0, need / p[i])
        cost += take * q[i]
        need -= take * p[i]
    return _bits(cost)


def dh_sdp_program(omega, tau, eps: float) -> SdpProblem:
    """Conic form of ``min Tr[L tau]`` over ``L + W = I``, ``Tr[L omega] = 1 - eps``.

    Blocks are the real embeddings of ``L`` and ``W`` (size ``2n`` each).
    The Hermitian identity ``L + W = I`` is imposed coordinate-wise in an
    orthonormal Hermitian basis.
    """
    omega = as_operator(omega)
    tau = as_operator(tau)
    n = omega.dim
    pb = ProblemBuilder()
    lam = pb.block(2 * n)
    slack = pb.block(2 * n)
    pb.objective(lam, complex_embed(tau) / 2.0)
    pb.constraint({lam: complex_embed(omega) / 2.0}, 1.0 - eps)
    for e in hermitian_basis(n):
        emb = complex_embed(e) / 2.0
        pb.constraint({lam: emb, slack: emb}, np.trace(e).real)
    return pb.build("min")


def dh_sdp_solve(omega, tau, eps: float, tol: float = 1e-10) -> Tuple[float, SdpProblem, SdpSolution]:
    """Solve :func:`dh_sdp_program` with ``tau`` rescaled to unit trace.

    Returns ``(value_bits, problem, solution)``; the value already undoes the
    rescaling.
    """
    eps = _check_eps(eps)
    if not 0.0 < eps < 1.0:
        raise DomainError("the SDP route needs 0 < eps < 1 (strict feasibility)")
    omega, tau = _check_inputs(omega, tau)
    scale = tau.trace()
    if scale <= 0.0:
        raise DomainError("tau must be nonzero")
    prob = dh_sdp_program(omega, tau / scale, eps)
    sol = solve(prob, tol=tol)
    if not sol.optimal:
        raise NumericalFailure(
            f"D_H SDP failed: {sol.status.value} ({sol.message}); "
            f"residuals {sol.primal_residual:.2e}/{sol.dual_residual:.2e}, gap {sol.gap:.2e}",
            residual=max(sol.primal_residual, sol.dual_residual, sol.gap),
        )
    value = _bits(sol.primal_obj)
    return value - math.log2(scale), prob, sol


def dh_sdp(omega, tau, eps: float, tol: float = 1e-10) -> float:
    """``D_H^eps(omega || tau)`` in bits from the SDP route."""
    return dh_sdp_solve(omega, tau, eps, tol)[0]
