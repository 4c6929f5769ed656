"""epsilon-Rains relative entropy

    R_H^eps(rho) = min { D_H^eps(rho || sigma) : sigma in PPT' }
    PPT' = { sigma >= 0 : ||T_B(sigma)||_1 <= 1 }

Three routes are provided: the closed form for maximally entangled states,
an exact reduction for twirl-invariant (isotropic) inputs, and a general SDP.

General SDP. Writing the inner D_H^eps as its dual and the PPT' condition as
``T_B(sigma) = P - Q`` with ``Tr[P + Q] <= 1`` gives one program::

    maximize   (1 - eps) mu - Tr[Z]
    subject to mu rho - Z <= T_B(P - Q),   T_B(P - Q) >= 0,   Tr[P + Q] <= 1
               mu >= 0,  Z, P, Q >= 0

with ``R_H^eps = -log2(optimum)`` and optimizer ``sigma = T_B(P - Q)``.

Isotropic reduction. For ``rho = F Phi + (1 - F)(I - Phi)/(d**2 - 1)`` the
twirl may be applied to ``sigma`` and to the test without loss, so both are
isotropic. The inner problem becomes a two-class LP with ``p = (F, 1 - F)``
and ``q = (alpha, beta)``, whose value ``min_v v.q`` is a minimum over the
vertices ``v`` of ``{x in [0,1]^2 : p.x = 1 - eps}``. It is maximized over
the polygon ``{alpha, beta >= 0, alpha + beta <= 1, alpha <= 1/d}``, where
the optimum sits on a polygon vertex or where two pieces of the minimum
switch along an edge.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .channels import twirl
from .errors import DimensionError, DomainError, InvalidStateError, NumericalFailure
from .hyptest import dh_lp_oracle, dh_neyman_pearson
from .linalg import (
    HermitianOperator,
    as_operator,
    frobenius_norm,
    hermitian_eig,
    partial_transpose_B,
    support_projector,
    trace_norm,
)
from .sdp import ProblemBuilder, SdpProblem, SdpSolution, complex_embed, complex_unembed, hermitian_basis, solve
from .states import IsotropicCoordinates, ReducedTestCoordinates, isotropic_operator, max_entangled

__all__ = [
    "EPS_CAP",
    "PptPrimeCandidate",
    "RainsResult",
    "isotropic_fidelity",
    "isotropic_ppt_region",
    "isotropic_pt_norm",
    "ppt_prime_membership",
    "rains",
    "rains_closed_form_max_ent",
    "rains_general_sdp",
    "rains_grid_search",
    "rains_isotropic_power",
    "rains_isotropic_reduced",
    "rains_program",
]

MEMBER_TOL = 1e-10
TWIRL_TOL = 1e-9
WITNESS_TOL = 1e-5
EPS_CAP = 1.0 - 1e-6
SDP_TOL = 1e-10
FID_SNAP = 1e-12


@dataclass(frozen=True)
class PptPrimeCandidate:
    """``sigma`` with its PSD margin (minimum eigenvalue) and ``||T_B(sigma)||_1``."""

    sigma: HermitianOperator
    psd_margin: float
    pt_trace_norm: float

    @property
    def is_member(self) -> bool:
        return self.psd_margin >= -MEMBER_TOL and self.pt_trace_norm <= 1.0 + MEMBER_TOL


def ppt_prime_membership(sigma) -> PptPrimeCandidate:
    sigma = as_operator(sigma)
    if not sigma.is_bipartite:
        raise DimensionError("PPT' membership needs bipartite dims")
    margin = float(hermitian_eig(sigma).values[-1])
    return PptPrimeCandidate(sigma, margin, trace_norm(partial_transpose_B(sigma)))


def isotropic_pt_norm(c: IsotropicCoordinates) -> float:
    """``||T_B(alpha Phi + beta (I - Phi)/(d**2 - 1))||_1`` by the case formula.

    ``T_B(Phi) = F/d`` has eigenvalue ``+1/d`` on the symmetric and ``-1/d`` on
    the antisymmetric subspace, which gives ``alpha + beta`` when
    ``beta >= alpha (d - 1)`` and ``d alpha`` otherwise.
    """
    if c.beta >= c.alpha * (c.d - 1):
        return c.alpha + c.beta
    return c.d * c.alpha


def isotropic_ppt_region(c: IsotropicCoordinates, tol: float = MEMBER_TOL) -> bool:
    """Membership of the isotropic operator ``c`` in PPT'."""
    if c.beta >= c.alpha * (c.d - 1):
        return c.alpha + c.beta <= 1.0 + tol
    return c.d * c.alpha <= 1.0 + tol


def rains_closed_form_max_ent(d: int, eps: float) -> float:
    """``log2 d + log2(1 / (1 - eps))`` bits."""
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    if not 0.0 <= eps < 1.0:
        raise DomainError(f"eps must lie in [0, 1), got {eps}")
    return math.log2(d) - math.log2(1.0 - eps)


@dataclass(frozen=True)
class RainsResult:
    """Value of ``R_H^eps`` in bits with a PPT' optimizer.

    ``certified_gap`` is the solver's duality gap on the type-II error scale
    (zero for exact routes). ``status`` is ``"ok"`` or ``"eps_capped"`` when
    ``eps`` was lowered to :data:`EPS_CAP`. ``witness_bits`` is
    ``D_H^eps(rho || sigma*)`` recomputed by the Neyman-Pearson routine.
    """

    value_bits: float
    optimizer_sigma: PptPrimeCandidate
    method: str
    certified_gap: float
    eps: float
    witness_bits: float
    coordinates: Optional[IsotropicCoordinates] = None
    test_coordinates: Optional[ReducedTestCoordinates] = None
    status: str = "ok"
    solution: Optional[SdpSolution] = field(default=None, repr=False, compare=False)


def _cap_eps(eps: float) -> Tuple[float, str]:
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"eps must lie in [0, 1], got {eps}")
    if eps > EPS_CAP:
        warnings.warn(f"eps={eps} capped at {EPS_CAP}", RuntimeWarning, stacklevel=3)
        return EPS_CAP, "eps_capped"
    return eps, "ok"


def _check_state(rho) -> HermitianOperator:
    rho = as_operator(rho)
    if not rho.is_bipartite:
        raise DimensionError("rho needs bipartite dims")
    if hermitian_eig(rho).values[-1] < -1e-10 or abs(rho.trace() - 1.0) > 1e-8:
        raise InvalidStateError("rho must be a density operator")
    return rho


def _witness(rho, cand: PptPrimeCandidate, eps: float, value: float) -> float:
    """Upper-bound check: ``D_H(rho || sigma*)`` must reproduce ``value``."""
    if not cand.is_member:
        raise NumericalFailure(
            f"optimizer left PPT' (psd margin {cand.psd_margin:.3e}, pt norm {cand.pt_trace_norm:.12g})",
            residual=max(-cand.psd_margin, cand.pt_trace_norm - 1.0),
        )
    w = dh_neyman_pearson(rho, cand.sigma, eps).value_bits
    miss = abs(w - value)
    if not miss <= WITNESS_TOL:
        raise NumericalFailure(f"witness D_H = {w!r} disagrees with R_H = {value!r}", residual=miss)
    return w


# ----------------------------------------------------------------------------
# Isotropic inputs


def isotropic_fidelity(rho, tol: float = TWIRL_TOL) -> float:
    """``Tr[Phi rho]`` for a twirl-invariant state on ``C^d (x) C^d``."""
    rho = _check_state(rho)
    drift = frobenius_norm(twirl(rho) - rho)
    if drift > tol:
        raise DomainError(f"state is not twirl invariant (||T(rho) - rho||_F = {drift:.3e})")
    fid = float(np.vdot(max_entangled(rho.dims[0]).data, rho.data).real)
    # D_H^0 depends on the exact support, so rounding dust at the endpoints
    # (e.g. 1 - 2e-16 for Phi itself) is snapped away
    if fid < FID_SNAP:
        return 0.0
    if fid > 1.0 - FID_SNAP:
        return 1.0
    return fid


def _lp_vertices(p: Tuple[float, float], c: float):
    """Vertices of ``{x in [0,1]^2 : p.x = c}``."""
    pts = []
    for i in (0, 1):
        j = 1 - i
        for xi in (0.0, 1.0):
            if p[j] > 0.0:
                xj = (c - p[i] * xi) / p[j]
                if -1e-15 <= xj <= 1.0 + 1e-15:
                    v = [0.0, 0.0]
                    v[i], v[j] = xi, min(1.0, max(0.0, xj))
                    pts.append(tuple(v))
            elif abs(c - p[i] * xi) <= 1e-15:
                for xj in (0.0, 1.0):
                    v = [0.0, 0.0]
                    v[i], v[j] = xi, xj
                    pts.append(tuple(v))
    uniq = []
    for v in pts:
        if all(abs(v[0] - u[0]) + abs(v[1] - u[1]) > 1e-14 for u in uniq):
            uniq.append(v)
    return uniq


def _region_vertices(d: int):
    if d == 1:
        return [(0.0, 0.0), (1.0, 0.0)]
    return [(0.0, 0.0), (0.0, 1.0), (1.0 / d, 1.0 - 1.0 / d), (1.0 / d, 0.0)]


def _reduced_optimum(d: int, fid: float, eps: float):
    p = (fid, 1.0 - fid)
    tests = _lp_vertices(p, 1.0 - eps)
    poly = _region_vertices(d)
    cands = list(poly)
    edges = list(zip(poly, poly[1:] + poly[:1]))
    for a in range(len(tests)):
        for b in range(a + 1, len(tests)):
            g = (tests[a][0] - tests[b][0], tests[a][1] - tests[b][1])
            for u, w in edges:
                gu = g[0] * u[0] + g[1] * u[1]
                gw = g[0] * w[0] + g[1] * w[1]
                if gu != gw and gu * gw <= 0.0:
                    s = gu / (gu - gw)
                    cands.append((u[0] + s * (w[0] - u[0]), u[1] + s * (w[1] - u[1])))

    def inner(q):
        vals = [v[0] * q[0] + v[1] * q[1] for v in tests]
        k = int(np.argmin(vals))
        return vals[k], tests[k]

    best = None
    for q in cands:
        q = (max(0.0, q[0]), max(0.0, q[1]))
        val, v = inner(q)
        if best is None or val > best[0]:
            best = (val, q, v)
    return best


def rains_isotropic_reduced(rho, eps: float) -> RainsResult:
    """``R_H^eps`` of a twirl-invariant state by exact enumeration.

    Parameters
    ----------
    rho : state on ``C^d (x) C^d``
        Must satisfy ``||twirl(rho) - rho||_F <= 1e-9``.
    eps : float
        Type-I error in ``[0, 1]``; values above :data:`EPS_CAP` are capped.

    Returns
    -------
    RainsResult
        ``coordinates`` holds the optimal isotropic ``sigma`` and
        ``test_coordinates`` the twirled optimal test.
    """
    eps, status = _cap_eps(eps)
    rho = _check_state(rho)
    d = rho.dims[0]
    if rho.dims[1] != d:
        raise DimensionError(f"isotropic reduction needs dA == dB, got {rho.dims}")
    fid = isotropic_fidelity(rho)
    val, q, v = _reduced_optimum(d, fid, eps)
    value = -math.log2(val) if val > 0 else math.inf
    coords = IsotropicCoordinates(d, q[0], q[1] if d > 1 else 0.0)
    test = ReducedTestCoordinates(d, v[0], v[1] * (d * d - 1))
    cand = ppt_prime_membership(isotropic_operator(coords))
    w = _witness(rho, cand, eps, value) if math.isfinite(value) else math.inf
    return RainsResult(value, cand, "reduced", 0.0, eps, w, coords, test, status)


def rains_grid_search(rho, eps: float, n: int = 200) -> float:
    """Grid oracle for isotropic inputs.

    ``n`` values of ``alpha`` in ``[0, 1/d]`` times ``n`` values of ``beta``
    in ``[0, 1 - alpha]``, so every polygon corner is a grid point. Each
    point is scored with the knapsack oracle. Accuracy is ``O(1/n)`` when the
    optimum lies inside an edge.
    """
    rho = _check_state(rho)
    d = rho.dims[0]
    fid = isotropic_fidelity(rho)
    p = [fid, 1.0 - fid]
    best = 0.0
    for a in np.linspace(0.0, 1.0 / d, n):
        for b in np.linspace(0.0, 1.0 - a, n) if d > 1 else [0.0]:
            if a + b <= 0.0 or not isotropic_ppt_region(IsotropicCoordinates(d, a, b)):
                continue
            best = max(best, 2.0 ** -dh_lp_oracle(p, [a, b], eps))
    return -math.log2(best) if best > 0 else math.inf


# ----------------------------------------------------------------------------
# General SDP


def rains_program(rho, eps: float) -> Tuple[SdpProblem, dict]:
    """Standard-form SDP for ``R_H^eps`` (``eps > 0``) or its ``eps = 0``
    support-projector variant.

    Returns the problem and a map from variable names to block indices.
    Hermitian equalities are imposed in an orthonormal Hermitian basis ``E_k``
    using ``<E_k, T_B(X)> = <T_B(E_k), X>``.
    """
    rho = as_operator(rho)
    n = rho.dim
    basis = hermitian_basis(n)
    emb = [complex_embed(e) / 2.0 for e in basis]
    emb_pt = [complex_embed(partial_transpose_B(HermitianOperator(e, rho.dims))) / 2.0 for e in basis]
    pb = ProblemBuilder()
    blk = {}
    if eps > 0.0:
        blk["mu"] = pb.block(1)
    blk["s"] = pb.block(1)
    if eps > 0.0:
        blk["Z"] = pb.block(2 * n)
    blk["P"] = pb.block(2 * n)
    blk["Q"] = pb.block(2 * n)
    if eps > 0.0:
        blk["W1"] = pb.block(2 * n)
    blk["W2"] = pb.block(2 * n)
    half_eye = np.eye(2 * n) / 2.0

    if eps > 0.0:
        pb.objective(blk["mu"], [[1.0 - eps]])
        pb.objective(blk["Z"], -half_eye)
        # W1 = T_B(P - Q) - mu rho + Z
        for e, ek, pk in zip(basis, emb, emb_pt):
            pb.constraint(
                {
                    blk["W1"]: ek,
                    blk["P"]: -pk,
                    blk["Q"]: pk,
                    blk["mu"]: [[float(np.vdot(e, rho.data).real)]],
                    blk["Z"]: -ek,
                },
                0.0,
            )
    else:
        proj = complex_embed(partial_transpose_B(support_projector(rho).with_dims(rho.dims))) / 2.0
        pb.objective(blk["P"], proj)
        pb.objective(blk["Q"], -proj)
    # W2 = T_B(P - Q)
    for ek, pk in zip(emb, emb_pt):
        pb.constraint({blk["W2"]: ek, blk["P"]: -pk, blk["Q"]: pk}, 0.0)
    pb.constraint({blk["P"]: half_eye, blk["Q"]: half_eye, blk["s"]: [[1.0]]}, 1.0)
    return pb.build("max"), blk


def _extract_sigma(sol: SdpSolution, blk: dict, dims) -> PptPrimeCandidate:
    diff = complex_unembed(sol.x[blk["P"]]) - complex_unembed(sol.x[blk["Q"]])
    sigma = partial_transpose_B(HermitianOperator(diff, dims))
    e = hermitian_eig(sigma)
    if e.values[-1] < 0.0:
        sigma = HermitianOperator((e.vectors * np.clip(e.values, 0.0, None)) @ e.vectors.conj().T, dims)
    norm = trace_norm(partial_transpose_B(sigma))
    if norm > 1.0:
        sigma = sigma / norm
    return ppt_prime_membership(sigma)


def rains_general_sdp(rho, eps: float, tol: float = SDP_TOL) -> RainsResult:
    """``R_H^eps`` of an arbitrary bipartite state from one SDP.

    The optimizer ``sigma* = T_B(P - Q)`` is clamped to the PSD cone,
    renormalized into PPT' if the solver overshoots, and fed back through
    :func:`entlaw.hyptest.dh_neyman_pearson`. A mismatch above ``1e-5`` bits
    raises :class:`NumericalFailure`.
    """
    eps, status = _cap_eps(eps)
    rho = _check_state(rho)
    prob, blk = rains_program(rho, eps)
    sol = solve(prob, tol=tol)
    if not sol.optimal:
        raise NumericalFailure(
            f"Rains SDP failed: {sol.status.value} ({sol.message}); residuals "
            f"{sol.primal_residual:.2e}/{sol.dual_residual:.2e}, gap {sol.gap:.2e}",
            residual=max(sol.primal_residual, sol.dual_residual, sol.gap),
        )
    value = -math.log2(sol.primal_obj) if sol.primal_obj > 0 else math.inf
    cand = _extract_sigma(sol, blk, rho.dims)
    w = _witness(rho, cand, eps, value) if math.isfinite(value) else math.inf
    return RainsResult(value, cand, "sdp", sol.gap, eps, w, status=status, solution=sol)


def _isotropic_power_program(d: int, fid: float, n: int, eps: float) -> SdpProblem:
    # Per copy, T_B(Phi) is +-1/d and T_B((I - Phi)/(d**2 - 1)) is
    # 1/(d(d+1)) or 1/(d(d-1)) on the symmetric / antisymmetric subspace.
    s_phi, a_phi = 1.0 / d, -1.0 / d
    s_c, a_c = 1.0 / (d * (d + 1)), 1.0 / (d * (d - 1))
    ks = range(n + 1)
    p = [math.comb(n, k) * fid ** (n - k) * (1.0 - fid) ** k for k in ks]
    mult = [math.comb(n, j) * (d * (d - 1) // 2) ** j * (d * (d + 1) // 2) ** (n - j) for j in ks]
    pb = ProblemBuilder()
    mu = pb.block(1)
    z = [pb.block(1) for _ in ks]
    w = [pb.block(1) for _ in ks]
    t = [pb.block(1) for _ in ks]
    u = [pb.block(1) for _ in ks]
    v = [pb.block(1) for _ in ks]
    s = pb.block(1)
    pb.objective(mu, [[1.0 - eps]])
    for k in ks:
        pb.objective(z[k], [[-1.0]])
        # mu p_k - z_k + t_k = q_k = C(n, k) w_k
        pb.constraint({mu: [[p[k]]], z[k]: [[-1.0]], t[k]: [[1.0]], w[k]: [[-float(math.comb(n, k))]]}, 0.0)
    for j in ks:
        terms = {u[j]: [[-1.0]], v[j]: [[1.0]]}
        for k in ks:
            e = 0.0
            for m in range(max(0, k - (n - j)), min(j, k) + 1):
                e += (
                    math.comb(j, m) * math.comb(n - j, k - m)
                    * a_c ** m * s_c ** (k - m) * a_phi ** (j - m) * s_phi ** (n - k - j + m)
                )
            terms[w[k]] = [[e]]
        pb.constraint(terms, 0.0)
    norm = {s: [[1.0]]}
    for j in ks:
        norm[u[j]] = [[float(mult[j])]]
        norm[v[j]] = [[float(mult[j])]]
    pb.constraint(norm, 1.0)
    return pb.build("max")


def rains_isotropic_power(d: int, fid: float, n: int, eps: float, tol: float = SDP_TOL) -> float:
    """``R_H^eps`` of ``rho^{(x) n}`` for the isotropic state of fidelity ``fid``.

    Both ``sigma`` and the test may be averaged over independent twirls of
    each copy and over copy permutations, leaving ``n + 1`` weights ``w_k``
    on the sums of products with ``k`` factors ``(I - Phi)/(d**2 - 1)`` and
    ``n - k`` factors ``Phi``. ``T_B(sigma)`` is then diagonal over products
    of per-copy symmetric/antisymmetric subspaces and PPT' becomes linear.
    The resulting LP is solved with the 1x1-block SDP solver. Needs
    ``d >= 2``.
    """
    if d < 2:
        raise DomainError("tensor-power reduction needs d >= 2")
    if n < 1:
        raise DomainError("n must be >= 1")
    if not 0.0 <= fid <= 1.0:
        raise DomainError(f"fidelity must lie in [0, 1], got {fid}")
    eps, _ = _cap_eps(eps)
    if eps == 0.0:
        raise DomainError("tensor-power reduction needs eps > 0")
    sol = solve(_isotropic_power_program(d, fid, n, eps), tol=tol)
    if not sol.optimal:
        raise NumericalFailure(f"tensor-power LP failed: {sol.message}", residual=sol.gap)
    return -math.log2(sol.primal_obj)


def rains(rho, eps: float, method: str = "auto", tol: float = SDP_TOL) -> RainsResult:
    """Dispatch: ``auto`` uses the isotropic reduction when ``rho`` is
    twirl invariant and the general SDP otherwise."""
    if method not in ("auto", "reduced", "sdp"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        rho = _check_state(rho)
        method = "sdp"
        if rho.dims[0] == rho.dims[1] and frobenius_norm(twirl(rho) - rho) <= TWIRL_TOL:
            method = "reduced"
    if method == "reduced":
        return rains_isotropic_reduced(rho, eps)
    return rains_general_sdp(rho, eps, tol=tol)
