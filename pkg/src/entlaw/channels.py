"""Kraus-form channels, the bilateral isotropic twirl, the binary success
measurement, and a small library of product-form (LOCC) protocols used to
simulate dilution and distillation.

Protocols here are only *syntactically* LOCC: every Kraus operator is a
tensor product ``K_A (x) K_B``. No realizability check is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import DimensionError, DomainError
from .linalg import HermitianOperator, as_operator
from .states import make_rng, max_entangled, random_unitary

__all__ = [
    "KrausChannel",
    "apply",
    "compose",
    "full_depolarizer",
    "identity_channel",
    "isotropic_noise",
    "local_dephasing",
    "local_product",
    "local_resize",
    "measurement_channel",
    "random_kraus_channel",
    "success_measurement",
    "twirl",
    "twirl_sampled",
]

TP_TOL = 1e-10


@dataclass(frozen=True)
class KrausChannel:
    """Channel ``rho -> sum_k K rho K^H``.

    ``in_dims``/``out_dims`` record the bipartite split of input and output
    when the channel acts on ``A (x) B``.
    """

    kraus_ops: Tuple[np.ndarray, ...]
    label: str = ""
    in_dims: Optional[Tuple[int, int]] = None
    out_dims: Optional[Tuple[int, int]] = None
    _in_dim: int = field(init=False, repr=False)
    _out_dim: int = field(init=False, repr=False)

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.ndim != 2 or k.shape != shape for k in ops):
            raise DimensionError("Kraus operators must share one 2-d shape")
        for k in ops:
            k.setflags(write=False)
        out_dim, in_dim = shape
        gram = sum(k.conj().T @ k for k in ops)
        defect = float(np.linalg.norm(gram - np.eye(in_dim)))
        if defect > TP_TOL:
            raise DomainError(f"Kraus set is not trace preserving (defect {defect:.3e})")
        for dims, n in ((self.in_dims, in_dim), (self.out_dims, out_dim)):
            if dims is not None and dims[0] * dims[1] != n:
                raise DimensionError(f"dims {dims} incompatible with dimension {n}")
        object.__setattr__(self, "kraus_ops", ops)
        object.__setattr__(self, "_in_dim", in_dim)
        object.__setattr__(self, "_out_dim", out_dim)

    @property
    def in_dim(self) -> int:
        return self._in_dim

    @property
    def out_dim(self) -> int:
        return self._out_dim

    def __call__(self, rho) -> HermitianOperator:
        return apply(self, rho)


def apply(ch: KrausChannel, rho) -> HermitianOperator:
    rho = as_operator(rho)
    if rho.dim != ch.in_dim:
        raise DimensionError(f"channel expects dimension {ch.in_dim}, got {rho.dim}")
    r = rho.data
    out = sum(k @ r @ k.conj().T for k in ch.kraus_ops)
    return HermitianOperator(out, ch.out_dims)


def compose(second: KrausChannel, first: KrausChannel, label: str = None) -> KrausChannel:
    """``second o first``."""
    if second.in_dim != first.out_dim:
        raise DimensionError(f"cannot compose: {first.out_dim} -> {second.in_dim}")
    ops = tuple(b @ a for b in second.kraus_ops for a in first.kraus_ops)
    return KrausChannel(
        ops,
        label or f"{second.label} o {first.label}",
        in_dims=first.in_dims,
        out_dims=second.out_dims,
    )


def identity_channel(d_a: int, d_b: int = None) -> KrausChannel:
    d_b = d_a if d_b is None else d_b
    return KrausChannel((np.eye(d_a * d_b),), "identity", (d_a, d_b), (d_a, d_b))


def _weyl(d: int):
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b) for a in range(d) for b in range(d)]


def full_depolarizer(d: int) -> KrausChannel:
    """``rho -> Tr[rho] I / d`` from the ``d**2`` normalized Weyl operators."""
    return KrausChannel(tuple(w / d for w in _weyl(d)), f"depolarize[{d}]")


def local_product(ch_a: KrausChannel, ch_b: KrausChannel, label: str = None) -> KrausChannel:
    """``E_A (x) F_B`` for single-party channels."""
    ops = tuple(np.kron(ka, kb) for ka in ch_a.kraus_ops for kb in ch_b.kraus_ops)
    return KrausChannel(
        ops,
        label or f"{ch_a.label} (x) {ch_b.label}",
        in_dims=(ch_a.in_dim, ch_b.in_dim),
        out_dims=(ch_a.out_dim, ch_b.out_dim),
    )


def isotropic_noise(d: int, p: float) -> KrausChannel:
    """With probability ``p`` Alice fully depolarizes her share.

    Acting on ``Phi^d`` this yields the isotropic state
    ``(1 - p) Phi + p I / d**2``.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    ops = [np.sqrt(1.0 - p) * np.eye(d * d)]
    ops += [np.sqrt(p) / d * np.kron(w, np.eye(d)) for w in _weyl(d)]
    return KrausChannel(tuple(ops), f"isotropic_noise[d={d},p={p:g}]", (d, d), (d, d))


def local_dephasing(d: int, p: float) -> KrausChannel:
    """With probability ``p`` Alice measures in the computational basis.

    On ``Phi^d`` this mixes in the classically correlated state
    ``(1/d) sum_i |ii><ii|``.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    ops = [np.sqrt(1.0 - p) * np.eye(d * d)]
    for i in range(d):
        proj = np.zeros((d, d))
        proj[i, i] = 1.0
        ops.append(np.sqrt(p) * np.kron(proj, np.eye(d)))
    return KrausChannel(tuple(ops), f"local_dephasing[d={d},p={p:g}]", (d, d), (d, d))


def _resize_local(d_in: int, d_out: int):
    if d_out >= d_in:
        v = np.zeros((d_out, d_in))
        v[:d_in, :d_in] = np.eye(d_in)
        return [v]
    keep = np.zeros((d_out, d_in))
    keep[:, :d_out] = np.eye(d_out)
    ops = [keep]
    for j in range(d_out, d_in):
        reprepare = np.zeros((d_out, d_in))
        reprepare[0, j] = 1.0
        ops.append(reprepare)
    return ops


def local_resize(d_in: int, d_out: int) -> KrausChannel:
    """Both parties map ``C^d_in -> C^d_out`` locally.

    Enlarging embeds isometrically. Shrinking keeps the first ``d_out`` levels
    and re-prepares ``|0>`` when the discarded levels are found.
    """
    if d_in < 1 or d_out < 1:
        raise DomainError("dimensions must be >= 1")
    local = _resize_local(d_in, d_out)
    ops = tuple(np.kron(ka, kb) for ka in local for kb in local)
    return KrausChannel(ops, f"local_resize[{d_in}->{d_out}]", (d_in, d_in), (d_out, d_out))


def random_kraus_channel(dim: int, n_kraus: int = 3, seed=None, out_dim: int = None) -> KrausChannel:
    """Random channel from a Haar-random isometry split into ``n_kraus`` blocks."""
    out_dim = dim if out_dim is None else out_dim
    n_kraus = max(n_kraus, -(-dim // out_dim))
    rng = make_rng(seed)
    u = random_unitary(out_dim * n_kraus, rng)
    iso = u[:, :dim]
    ops = tuple(iso[k * out_dim:(k + 1) * out_dim] for k in range(n_kraus))
    return KrausChannel(ops, f"random[{dim}->{out_dim},{n_kraus}]")


def _require_square_bipartite(x: HermitianOperator) -> int:
    if x.dims is None:
        raise DimensionError("twirl requires bipartite dims")
    d_a, d_b = x.dims
    if d_a != d_b:
        raise DimensionError(f"twirl needs dA == dB, got {x.dims}")
    return d_a


def twirl(x) -> HermitianOperator:
    """Closed-form bilateral ``U (x) conj(U)`` twirl::

        T(X) = Phi Tr[Phi X] + (I - Phi)/(d**2 - 1) Tr[(I - Phi) X]
    """
    x = as_operator(x)
    d = _require_square_bipartite(x)
    phi = max_entangled(d).data
    a = np.vdot(phi, x.data).real
    out = a * phi
    if d > 1:
        b = x.trace() - a
        out = out + b * (np.eye(d * d) - phi) / (d * d - 1)
    return HermitianOperator(out, x.dims)


def twirl_sampled(x, n_samples: int, seed=None) -> HermitianOperator:
    """Monte-Carlo twirl: mean of ``(U (x) conj U) X (U (x) conj U)^H`` over
    ``n_samples`` Haar unitaries."""
    x = as_operator(x)
    d = _require_square_bipartite(x)
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    rng = make_rng(seed)
    acc = np.zeros_like(x.data)
    m = x.data
    for _ in range(n_samples):
        u = random_unitary(d, rng)
        w = np.kron(u, u.conj())
        acc += w @ m @ w.conj().T
    return HermitianOperator(acc / n_samples, x.dims)


def success_measurement(omega, target) -> float:
    """``Tr[Phi omega]``: probability of the ``Phi`` outcome of the binary
    measurement ``{Phi, I - Phi}``."""
    omega = as_operator(omega)
    target = as_operator(target)
    if omega.dim != target.dim:
        raise DimensionError(f"dimension mismatch: {omega.dim} vs {target.dim}")
    return float(np.vdot(target.data, omega.data).real)


def measurement_channel(omega, target) -> HermitianOperator:
    """``omega -> Tr[(I - Phi) omega] |0><0| + Tr[Phi omega] |1><1|``."""
    p1 = success_measurement(omega, target)
    return HermitianOperator(np.diag([as_operator(omega).trace() - p1, p1]))
