"""Acceptance battery.

Each check returns a :class:`CheckResult` with the worst observed metric and
the tolerance it was held to. :func:`run_all` runs them in order; the SDP
certificate check (8) re-examines every program solved by checks 1, 3 and 7.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import channels as ch
from .hyptest import dh_lp_oracle, dh_neyman_pearson, dh_sdp
from .linalg import HermitianOperator, frobenius_norm, partial_transpose_B, trace_norm
from .metrics import sine_distance
from .rains import (
    isotropic_ppt_region,
    isotropic_pt_norm,
    ppt_prime_membership,
    rains_closed_form_max_ent,
    rains_general_sdp,
    rains_isotropic_reduced,
)
from .sdp import check_certificate, recording
from .secondlaw import (
    build_protocols,
    library_specs,
    rains_soundness,
    run_protocols,
    trace_distance_lemma_sides,
)
from .states import (
    IsotropicCoordinates,
    isotropic_operator,
    max_entangled,
    random_density,
    spawn_rngs,
)

__all__ = ["CheckResult", "RunConfig", "CHECKS", "run_all", "format_result"]


@dataclass(frozen=True)
class RunConfig:
    """``tolerance`` is the certificate tolerance of check 8; SDPs are solved
    to ``tolerance / 100``."""

    tolerance: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.tolerance <= 1e-2:
            raise ValueError(f"tolerance must lie in (0, 1e-2], got {self.tolerance}")

    @property
    def solver_tol(self) -> float:
        return self.tolerance / 100.0


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str
    seconds: float = 0.0


def format_result(r: CheckResult) -> str:
    tag = "PASS" if r.passed else "FAIL"
    return f"{tag} [{r.number}] {r.name}: worst {r.worst:.3e} (tol {r.tolerance:.0e}) {r.detail} [{r.seconds:.1f}s]"


class _Ctx:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.sdp_log: list = []
        rngs = spawn_rngs(cfg.seed, 8)
        self.rng = dict(zip(range(1, 9), rngs))


def _worst(vals) -> float:
    vals = list(vals)
    return max(vals) if vals else 0.0


def check_prop1(ctx: _Ctx) -> CheckResult:
    tol_sdp, tol_red = 1e-6, 1e-8
    errs_sdp, errs_red = [], []
    with recording() as log:
        for d in (2, 3):
            for eps in (0.1, 0.3, 0.5, 0.9):
                r = rains_general_sdp(max_entangled(d), eps, tol=ctx.cfg.solver_tol)
                errs_sdp.append(abs(r.value_bits - rains_closed_form_max_ent(d, eps)))
    ctx.sdp_log += log
    for d in (2, 3, 4):
        for eps in (0.01, 0.1, 0.3, 0.5, 0.9):
            r = rains_isotropic_reduced(max_entangled(d), eps)
            errs_red.append(abs(r.value_bits - rains_closed_form_max_ent(d, eps)))
    ws, wr = _worst(errs_sdp), _worst(errs_red)
    ok = ws <= tol_sdp and wr <= tol_red
    return CheckResult(1, "Maximally entangled closed form", ok, ws, tol_sdp,
                       f"(sdp 8 points; reduced 15 points worst {wr:.1e} vs {tol_red:.0e})")


def check_ppt_region(ctx: _Ctx) -> CheckResult:
    tol = 1e-10
    worst_norm = 0.0
    mismatches = 0
    npts = 0
    for d in (2, 3, 4):
        for a in np.linspace(0.0, 1.0, 200):
            for b in np.linspace(0.0, 1.0, 200):
                c = IsotropicCoordinates(d, float(a), float(b) if d > 1 else 0.0)
                direct = trace_norm(partial_transpose_B(isotropic_operator(c)))
                worst_norm = max(worst_norm, abs(direct - isotropic_pt_norm(c)))
                # points within tol of the boundary are decided by either side
                if abs(direct - 1.0) > tol and isotropic_ppt_region(c) != (direct <= 1.0):
                    mismatches += 1
                npts += 1
    boundary = 0.0
    for d in (2, 3, 4):
        c = IsotropicCoordinates(d, 1.0 / d, (d - 1.0) / d)
        boundary = max(boundary, abs(ppt_prime_membership(isotropic_operator(c)).pt_trace_norm - 1.0))
    worst = max(worst_norm, boundary)
    ok = worst <= tol and mismatches == 0
    return CheckResult(2, "PPT' region formula", ok, worst, tol,
                       f"({npts} grid points, {mismatches} membership mismatches, corner {boundary:.1e})")


def check_dh_agreement(ctx: _Ctx) -> CheckResult:
    rng = ctx.rng[3]
    tol_sdp, tol_lp, tol_self = 1e-6, 1e-8, 1e-9
    e_sdp, e_lp, e_self = [], [], []
    with recording() as log:
        for i in range(50):
            n = 4 + i % 13
            omega = random_density(n, seed=rng)
            tau = random_density(n, seed=rng)
            for eps in (0.1, 0.5):
                np_val = dh_neyman_pearson(omega, tau, eps).value_bits
                e_sdp.append(abs(np_val - dh_sdp(omega, tau, eps, tol=ctx.cfg.solver_tol)))
    ctx.sdp_log += log
    for _ in range(100):
        n = int(rng.integers(2, 9))
        p = rng.dirichlet(np.ones(n))
        q = rng.dirichlet(np.ones(n)) * rng.uniform(0.2, 2.0)
        eps = float(rng.uniform(0.0, 0.95))
        np_val = dh_neyman_pearson(np.diag(p), np.diag(q), eps).value_bits
        e_lp.append(abs(np_val - dh_lp_oracle(p, q, eps)))
    for _ in range(20):
        n = int(rng.integers(2, 10))
        omega = random_density(n, seed=rng)
        eps = float(rng.uniform(0.0, 0.95))
        e_self.append(abs(dh_neyman_pearson(omega, omega, eps).value_bits + math.log2(1.0 - eps)))
    ws, wl, wf = _worst(e_sdp), _worst(e_lp), _worst(e_self)
    ok = ws <= tol_sdp and wl <= tol_lp and wf <= tol_self
    return CheckResult(3, "D_H three-way agreement", ok, ws, tol_sdp,
                       f"(NP-SDP 100 solves; NP-LP worst {wl:.1e} vs {tol_lp:.0e}; "
                       f"self-value worst {wf:.1e} vs {tol_self:.0e})")


def _random_ppt_prime(d: int, rng) -> HermitianOperator:
    sigma = random_density(d * d, rank=int(rng.integers(1, d * d + 1)), seed=rng, dims=(d, d))
    norm = trace_norm(partial_transpose_B(sigma))
    return sigma * (float(rng.uniform(0.2, 1.0)) / norm)


def check_twirl(ctx: _Ctx) -> CheckResult:
    rng = ctx.rng[4]
    tol_mc, tol_idem = 0.1, 1e-12
    e_mc, e_idem = [], []
    for d in (2, 3):
        x = random_density(d * d, seed=rng, dims=(d, d))
        exact = ch.twirl(x)
        e_mc.append(frobenius_norm(ch.twirl_sampled(x, 10_000, seed=rng) - exact))
        e_idem.append(float(np.max(np.abs(ch.twirl(exact).data - exact.data))))
    outside = 0
    for i in range(200):
        d = 2 + i % 3
        sigma = _random_ppt_prime(d, rng)
        if not ppt_prime_membership(sigma).is_member:
            raise AssertionError("generator produced a non-member")
        if not ppt_prime_membership(ch.twirl(sigma)).is_member:
            outside += 1
    wm, wi = _worst(e_mc), _worst(e_idem)
    ok = wm <= tol_mc and wi <= tol_idem and outside == 0
    return CheckResult(4, "Twirl validation", ok, wm, tol_mc,
                       f"(idempotence {wi:.1e} vs {tol_idem:.0e}; {outside}/200 twirled members left PPT')")


def check_second_law(ctx: _Ctx) -> CheckResult:
    protos = [p for spec in library_specs() for p in build_protocols(spec)]
    worst = -math.inf
    runs = violations = vacuous = 0
    for mode in ("fidelity", "trace"):
        for rep in run_protocols(protos, mode):
            runs += 1
            if rep.status == "vacuous":
                vacuous += 1
                continue
            worst = max(worst, rep.lhs_bits - rep.rhs_bits)
            if not rep.bound_holds:
                violations += 1
    ok = violations == 0 and len(protos) >= 50
    return CheckResult(5, "Second law, non-asymptotic", ok, max(worst, 0.0), 1e-9,
                       f"({runs} runs over {len(protos)} protocols x 2 modes, {vacuous} vacuous, "
                       f"{violations} violations; max lhs-rhs {worst:.2e})")


def check_distances(ctx: _Ctx) -> CheckResult:
    rng = ctx.rng[6]
    slack = 1e-8
    worst = -math.inf
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        s1, s2, s3 = (random_density(n, rank=int(rng.integers(1, n + 1)), seed=rng) for _ in range(3))
        worst = max(worst, sine_distance(s1, s3) - sine_distance(s1, s2) - sine_distance(s2, s3))
    for _ in range(200):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(2, 6))
        chan = ch.random_kraus_channel(n, int(rng.integers(1, 4)), seed=rng, out_dim=m)
        omega = random_density(n, seed=rng)
        tau = random_density(n, seed=rng)
        worst = max(worst, sine_distance(chan(omega), chan(tau)) - sine_distance(omega, tau))
        eps = float(rng.uniform(0.05, 0.9))
        worst = max(worst, dh_neyman_pearson(chan(omega), chan(tau), eps).value_bits
                    - dh_neyman_pearson(omega, tau, eps).value_bits)
    phi = {d: max_entangled(d) for d in (2, 3)}
    for i in range(1000):
        d = 2 + i % 2
        t = float(rng.uniform(0.0, 1.0)) ** 2
        omega = (1.0 - t) * phi[d].data + t * random_density(d * d, seed=rng).data
        dist, succ = trace_distance_lemma_sides(HermitianOperator(omega, (d, d)), d)
        worst = max(worst, (1.0 - dist) - succ)
    ok = worst <= slack
    return CheckResult(6, "Distance properties", ok, max(worst, 0.0), slack,
                       f"(1000 triangles, 200 channels x {{P, D_H}}, 1000 lemma states; max violation {worst:.2e})")


def check_soundness(ctx: _Ctx) -> CheckResult:
    protos = [p for spec in library_specs() for p in build_protocols(spec)]
    tol = 1e-6
    worst = -math.inf
    fails = 0
    with recording() as log:
        for proto in protos:
            lhs, r, eps, ok = rains_soundness(proto, tol=tol, sdp_tol=ctx.cfg.solver_tol)
            worst = max(worst, lhs - r)
            fails += not ok
    ctx.sdp_log += log
    return CheckResult(7, "Protocol soundness vs Rains bound", fails == 0, max(worst, 0.0), tol,
                       f"({len(protos)} distillation legs, {fails} failures; max lhs-R {worst:.2e})")


def check_certificates(ctx: _Ctx) -> CheckResult:
    tol = ctx.cfg.tolerance
    optimal = [(p, s) for p, s in ctx.sdp_log if s.optimal]
    worst = 0.0
    fails = 0
    for prob, sol in optimal:
        cert = check_certificate(prob, sol)
        worst = max(worst, cert.primal_residual, cert.dual_residual, cert.gap,
                    -cert.min_eig_x, -cert.min_eig_s)
        fails += not cert.passes(tol)
    ok = fails == 0 and len(optimal) == len(ctx.sdp_log) and len(optimal) > 0
    return CheckResult(8, "Solver certificates", ok, worst, tol,
                       f"({len(optimal)}/{len(ctx.sdp_log)} solves optimal, {fails} certificate failures)")


CHECKS: Sequence[Callable[[_Ctx], CheckResult]] = (
    check_prop1,
    check_ppt_region,
    check_dh_agreement,
    check_twirl,
    check_second_law,
    check_distances,
    check_soundness,
    check_certificates,
)


def run_all(cfg: Optional[RunConfig] = None, only: Optional[Sequence[int]] = None,
            progress: Optional[Callable[[CheckResult], None]] = None) -> List[CheckResult]:
    """Run the battery (or the checks numbered in ``only``).

    A check that raises is reported as failed with the exception text.
    """
    ctx = _Ctx(cfg or RunConfig())
    out = []
    for k, fn in enumerate(CHECKS, start=1):
        if only is not None and k not in only:
            continue
        t0 = time.perf_counter()
        try:
            res = fn(ctx)
        except Exception as exc:  # reported, not swallowed: the check fails
            res = CheckResult(k, fn.__name__, False, math.inf, math.nan, f"raised {type(exc).__name__}: {exc}")
        res.seconds = time.perf_counter() - t0
        out.append(res)
        if progress is not None:
            progress(res)
    return out
