"""Error accounting and simulated dilute-then-distill cycles.

A quasi-cyclic process dilutes ``Phi^{d_in}`` into (an approximation of)
``rho`` and then distills ``rho`` into (an approximation of)
``Phi^{d_out}``. With dilution error ``eps1`` and distillation error
``eps2`` the cycle obeys::

    log2 d_out <= log2 d_in + log2(1 / (1 - eps'))

where ``eps' = (sqrt(eps1) + sqrt(eps2))**2`` for errors measured as
``1 - F`` and ``eps' = eps1 + eps2`` for normalized trace distance.

The ``log2 d`` values in a :class:`SecondLawReport` are what a concrete
protocol achieves. They are one-sided witnesses for the one-shot
distillable entanglement (achievability) and entanglement cost
(feasibility); neither quantity is computed here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Sequence

from . import channels as ch
from .errors import DimensionError, DomainError
from .linalg import HermitianOperator, as_operator
from .metrics import fidelity, sine_distance, trace_distance
from .rains import rains_general_sdp, rains_isotropic_power
from .states import bipartite_power, isotropic_state, max_entangled

__all__ = [
    "BOUND_TOL",
    "ErrorBudget",
    "Protocol",
    "SecondLawReport",
    "build_protocols",
    "correction_term",
    "library_specs",
    "rains_soundness",
    "run_protocols",
    "simulate_quasi_cyclic",
    "sine_composition_check",
    "small_eps_expansion_check",
    "tensor_power_trend",
    "trace_distance_lemma_check",
    "trace_distance_lemma_sides",
]

BOUND_TOL = 1e-9
CHECK_SLACK = 1e-10
ERROR_FLOOR = 1e-14
MODES = ("fidelity", "trace")


@dataclass(frozen=True)
class ErrorBudget:
    """Dilution and distillation errors and their combination."""

    eps1: float
    eps2: float
    mode: str = "fidelity"

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("eps1", "eps2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")

    @property
    def eps_combined(self) -> float:
        if self.mode == "fidelity":
            return (math.sqrt(self.eps1) + math.sqrt(self.eps2)) ** 2
        return self.eps1 + self.eps2

    @property
    def is_vacuous(self) -> bool:
        return self.eps_combined >= 1.0


def correction_term(budget: ErrorBudget) -> float:
    """``log2(1 / (1 - eps'))`` bits; ``eps' >= 1`` makes the bound vacuous.

    >>> round(correction_term(ErrorBudget(0.1, 0.1, "trace")), 4)
    0.3219
    """
    e = budget.eps_combined
    if e >= 1.0:
        raise DomainError(f"combined error {e!r} >= 1: the bound is vacuous")
    return -math.log2(1.0 - e)


def small_eps_expansion_check(x: float):
    """``(log2(1/(1-x)), x / ln 2)``: the correction and its first-order term."""
    if not 0.0 <= x < 1.0:
        raise DomainError(f"x must lie in [0, 1), got {x}")
    return -math.log2(1.0 - x), x / math.log(2.0)


@dataclass(frozen=True)
class SecondLawReport:
    """Outcome of one simulated cycle.

    ``status`` is ``"holds"``, ``"violated"`` or ``"vacuous"`` (``eps' >= 1``;
    ``correction_bits`` and ``rhs_bits`` are then ``inf``).
    ``composed_distance`` is the distance of the full cycle output from
    ``Phi^{d_out}``: sine distance in fidelity mode, normalized trace
    distance in trace mode.
    """

    d_in: int
    d_out: int
    measured_eps1: float
    measured_eps2: float
    budget: ErrorBudget
    correction_bits: float
    lhs_bits: float
    rhs_bits: float
    bound_holds: bool
    composed_distance: float
    label: str = ""

    @property
    def status(self) -> str:
        if self.budget.is_vacuous:
            return "vacuous"
        return "holds" if self.bound_holds else "violated"

    @property
    def composition_holds(self) -> bool:
        b = self.budget
        if b.mode == "fidelity":
            cap = math.sqrt(b.eps1) + math.sqrt(b.eps2)
        else:
            cap = b.eps1 + b.eps2
        return self.composed_distance <= cap + BOUND_TOL


def _error(omega, target, mode: str) -> float:
    if mode == "fidelity":
        e = 1.0 - fidelity(omega, target)
    else:
        e = trace_distance(omega, target)
    # below the accuracy of the distance itself; sqrt(eps1) would magnify it
    if e < ERROR_FLOOR:
        return 0.0
    return min(1.0, e)


def simulate_quasi_cyclic(
    dilute: ch.KrausChannel,
    distill: ch.KrausChannel,
    rho,
    d_in: int,
    d_out: int,
    mode: str = "fidelity",
    label: str = "",
) -> SecondLawReport:
    """Run ``Phi^{d_in} -> dilute -> (~rho) -> distill -> (~Phi^{d_out})``.

    ``eps1`` compares ``dilute(Phi^{d_in})`` with ``rho`` and ``eps2``
    compares ``distill(rho)`` with ``Phi^{d_out}``, as ``1 - F`` (fidelity
    mode) or normalized trace distance (trace mode).
    """
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    rho = as_operator(rho)
    if dilute.in_dim != d_in * d_in:
        raise DimensionError(f"dilution expects {dilute.in_dim}, Phi^{d_in} has {d_in * d_in}")
    if dilute.out_dim != rho.dim or distill.in_dim != rho.dim:
        raise DimensionError("channels do not compose through rho")
    if distill.out_dim != d_out * d_out:
        raise DimensionError(f"distillation outputs {distill.out_dim}, Phi^{d_out} has {d_out * d_out}")
    phi_in = max_entangled(d_in)
    phi_out = max_entangled(d_out)
    diluted = dilute(phi_in)
    eps1 = _error(diluted, rho, mode)
    eps2 = _error(distill(rho), phi_out, mode)
    cycled = distill(diluted)
    composed = _error(cycled, phi_out, mode)
    if mode == "fidelity":
        composed = math.sqrt(composed)
    budget = ErrorBudget(eps1, eps2, mode)
    lhs = math.log2(d_out)
    if budget.is_vacuous:
        corr = rhs = math.inf
    else:
        corr = correction_term(budget)
        rhs = math.log2(d_in) + corr
    return SecondLawReport(
        d_in, d_out, eps1, eps2, budget, corr, lhs, rhs, lhs <= rhs + BOUND_TOL, composed, label
    )


def sine_composition_check(s1, s2, s3) -> bool:
    """``P(s1, s3) <= P(s1, s2) + P(s2, s3)`` up to ``1e-10``."""
    return sine_distance(s1, s3) <= sine_distance(s1, s2) + sine_distance(s2, s3) + CHECK_SLACK


def trace_distance_lemma_sides(omega, d: int):
    """``((1/2)||Phi - omega||_1, Tr[Phi omega])`` for ``Phi = Phi^d``."""
    phi = max_entangled(d)
    omega = as_operator(omega)
    if omega.dim != d * d:
        raise DimensionError(f"omega must act on d**2 = {d * d} dimensions")
    return trace_distance(phi, omega), ch.success_measurement(omega, phi)


def trace_distance_lemma_check(omega, d: int) -> bool:
    """``(1/2)||Phi - omega||_1 <= eps`` implies ``Tr[Phi omega] >= 1 - eps``,
    checked at ``eps`` equal to the actual distance."""
    dist, succ = trace_distance_lemma_sides(omega, d)
    return succ >= 1.0 - dist - CHECK_SLACK


# ----------------------------------------------------------------------------
# Protocol library
#
# Scaffolding for exercising the bound, not optimal protocols. Every channel
# is a product-form Kraus family (see entlaw.channels).


@dataclass(frozen=True)
class Protocol:
    label: str
    d_in: int
    d_out: int
    rho: HermitianOperator
    dilute: ch.KrausChannel
    distill: ch.KrausChannel

    def run(self, mode: str) -> SecondLawReport:
        return simulate_quasi_cyclic(self.dilute, self.distill, self.rho, self.d_in, self.d_out, mode, self.label)


def _channel(kind: str, d: int, params: Dict) -> ch.KrausChannel:
    if kind == "identity":
        return ch.identity_channel(d)
    if kind == "isotropic_noise":
        return ch.isotropic_noise(d, float(params["p"]))
    if kind == "local_dephasing":
        return ch.local_dephasing(d, float(params["p"]))
    if kind == "local_resize":
        return ch.local_resize(d, int(params["d_out"]))
    raise DomainError(f"unknown channel kind {kind!r}")


def _out_dim(kind: str, d: int, params: Dict) -> int:
    return int(params["d_out"]) if kind == "local_resize" else d


def _expand(spec: Dict) -> Iterator[Dict]:
    """Cartesian product over every list-valued entry, in sorted key order."""
    keys = sorted(spec)
    axes = [spec[k] if isinstance(spec[k], list) else [spec[k]] for k in keys]
    for combo in itertools.product(*axes):
        yield dict(zip(keys, combo))


def build_protocols(spec: Dict) -> List[Protocol]:
    """Instantiate protocols from a declarative spec.

    Keys (list values expand into a grid)::

        d_in              local dimension of the input Phi
        dilution          identity | isotropic_noise | local_dephasing | local_resize
        dilution_p        noise parameter for the dilution channel
        dilution_d_out    output dimension for local_resize dilution
        target            dilution_output | max_entangled | isotropic
        target_fidelity   Tr[Phi rho] for target = isotropic
        distillation      same kinds as dilution
        distillation_p    noise parameter for the distillation channel
        d_out             local dimension of the output Phi (resize target)
    """
    out = []
    for pt in _expand(spec):
        d_in = int(pt["d_in"])
        dkind = pt.get("dilution", "identity")
        dparams = {"p": pt.get("dilution_p", 0.0), "d_out": pt.get("dilution_d_out", d_in)}
        dilute = _channel(dkind, d_in, dparams)
        d = _out_dim(dkind, d_in, dparams)
        target = pt.get("target", "dilution_output")
        if target == "dilution_output":
            rho = dilute(max_entangled(d_in))
        elif target == "max_entangled":
            rho = max_entangled(d)
        elif target == "isotropic":
            rho = isotropic_state(d, float(pt["target_fidelity"]))
        else:
            raise DomainError(f"unknown target {target!r}")
        skind = pt.get("distillation", "identity")
        sparams = {"p": pt.get("distillation_p", 0.0), "d_out": pt.get("d_out", d)}
        distill = _channel(skind, d, sparams)
        d_out = _out_dim(skind, d, sparams)
        label = ";".join(f"{k}={pt[k]}" for k in sorted(pt))
        out.append(Protocol(label, d_in, d_out, rho.with_dims((d, d)), dilute, distill))
    return out


def library_specs() -> List[Dict]:
    """The built-in grid: zero-error cycles, noisy dilution with several
    distillation legs, mismatched targets, shrinking and over-ambitious
    enlarging distillation."""
    p = [0.0, 0.1, 0.2, 0.3, 0.5]
    return [
        {"d_in": [2, 3], "dilution": "identity", "distillation": "identity"},
        {"d_in": [2, 3], "dilution": "isotropic_noise", "dilution_p": p, "distillation": "identity"},
        {"d_in": [2, 3], "dilution": "local_dephasing", "dilution_p": p, "distillation": "identity"},
        {
            "d_in": 2,
            "dilution": "isotropic_noise",
            "dilution_p": [0.05, 0.2],
            "target": "isotropic",
            "target_fidelity": [0.7, 0.9, 1.0],
            "distillation": ["isotropic_noise", "local_dephasing"],
            "distillation_p": [0.1, 0.4],
        },
        {"d_in": 3, "dilution": "identity", "distillation": "local_resize", "d_out": [1, 2, 4, 6]},
        {"d_in": [2, 3], "dilution": "local_resize", "dilution_d_out": 2, "target": "max_entangled",
         "distillation": "identity"},
        {"d_in": 2, "dilution": "isotropic_noise", "dilution_p": [0.0, 0.02, 0.1], "distillation": "local_resize",
         "d_out": 4},
    ]


def run_protocols(protocols: Iterable[Protocol], mode: str) -> List[SecondLawReport]:
    return [proto.run(mode) for proto in protocols]


def rains_soundness(proto: Protocol, tol: float = 1e-6, sdp_tol: float = 1e-10):
    """Check ``log2 d_out <= R_H^eps(rho)`` at ``eps = 1 - F(distill(rho), Phi^{d_out})``.

    Returns ``(lhs, rains_bits, eps, holds)``.
    """
    phi_out = max_entangled(proto.d_out)
    eps = min(1.0, max(0.0, 1.0 - fidelity(proto.distill(proto.rho), phi_out)))
    if eps < 1e-12:
        eps = 0.0
    r = rains_general_sdp(proto.rho, eps, tol=sdp_tol).value_bits
    lhs = math.log2(proto.d_out)
    return lhs, r, eps, lhs <= r + tol


def tensor_power_trend(d: int, fid: float, eps: float, ns: Sequence[int] = (1, 2, 3), cross_check_dim: int = 16):
    """``R_H^eps(rho^{(x) n}) / n`` for an isotropic ``rho`` at a few ``n``.

    Illustrates finite-``n`` behaviour only; no limit is taken. Rows are
    ``(n, value_bits, per_copy_bits, sdp_bits)`` where ``sdp_bits`` comes
    from the general SDP on the explicit tensor power when its dimension is
    at most ``cross_check_dim`` and is ``nan`` otherwise.
    """
    rows = []
    for n in ns:
        v = rains_isotropic_power(d, fid, n, eps)
        sdp = math.nan
        if d ** (2 * n) <= cross_check_dim:
            sdp = rains_general_sdp(bipartite_power(isotropic_state(d, fid), n), eps).value_bits
        rows.append((n, v, v / n, sdp))
    return rows
