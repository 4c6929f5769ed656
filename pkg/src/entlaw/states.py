"""Constructors for maximally entangled states, isotropic operators, swap and
symmetric/antisymmetric projectors, and seeded random states and unitaries.

Randomness comes from :func:`numpy.random.default_rng`; independent streams
are derived with :func:`make_rng` via ``SeedSequence.spawn`` so a single seed
reproduces a whole test corpus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .linalg import HermitianOperator

__all__ = [
    "IsotropicCoordinates",
    "ReducedTestCoordinates",
    "antisym_projector",
    "basis_projector",
    "bipartite_power",
    "bipartite_tensor",
    "isotropic_operator",
    "isotropic_state",
    "make_rng",
    "max_entangled",
    "maximally_mixed",
    "product_state",
    "random_density",
    "random_unitary",
    "spawn_rngs",
    "swap_operator",
    "sym_projector",
]


@dataclass(frozen=True)
class IsotropicCoordinates:
    """``alpha * Phi + beta * (I - Phi) / (d**2 - 1)`` on ``C^d (x) C^d``."""

    d: int
    alpha: float
    beta: float

    def __post_init__(self):
        if self.d < 1:
            raise DomainError(f"d must be >= 1, got {self.d}")
        if self.alpha < 0 or self.beta < 0:
            raise DomainError(f"isotropic weights must be nonnegative, got ({self.alpha}, {self.beta})")
        if self.d == 1 and self.beta != 0:
            raise DomainError("d = 1 has no complement of Phi; beta must be 0")

    @property
    def trace(self) -> float:
        return self.alpha + self.beta


@dataclass(frozen=True)
class ReducedTestCoordinates:
    """Twirled test ``kappa * Phi + lam * (I - Phi) / (d**2 - 1)``."""

    d: int
    kappa: float
    lam: float

    def __post_init__(self):
        top = self.d * self.d - 1
        if not (0.0 <= self.kappa <= 1.0) or not (0.0 <= self.lam <= top):
            raise DomainError(f"need 0 <= kappa <= 1 and 0 <= lambda <= {top}")


def make_rng(seed=None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_rngs(seed, n: int):
    """``n`` statistically independent generators derived from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _check_d(d: int) -> int:
    d = int(d)
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    return d


def max_entangled(d: int) -> HermitianOperator:
    """``Phi^d = (1/d) sum_ij |ii><jj|`` with dims ``(d, d)``."""
    d = _check_d(d)
    idx = np.arange(d) * (d + 1)
    m = np.zeros((d * d, d * d), dtype=complex)
    m[np.ix_(idx, idx)] = 1.0 / d
    return HermitianOperator(m, (d, d))


def maximally_mixed(d_a: int, d_b: int = None) -> HermitianOperator:
    d_b = d_a if d_b is None else d_b
    n = _check_d(d_a) * _check_d(d_b)
    return HermitianOperator(np.eye(n) / n, (d_a, d_b))


def swap_operator(d: int) -> HermitianOperator:
    """``F = sum_ij |ij><ji|``."""
    d = _check_d(d)
    f = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return HermitianOperator(f, (d, d))


def sym_projector(d: int) -> HermitianOperator:
    f = swap_operator(d)
    return HermitianOperator((np.eye(d * d) + f.data) / 2, (d, d))


def antisym_projector(d: int) -> HermitianOperator:
    f = swap_operator(d)
    return HermitianOperator((np.eye(d * d) - f.data) / 2, (d, d))


def isotropic_operator(c: IsotropicCoordinates) -> HermitianOperator:
    d = c.d
    phi = max_entangled(d).data
    m = c.alpha * phi
    if d > 1:
        m = m + c.beta * (np.eye(d * d) - phi) / (d * d - 1)
    return HermitianOperator(m, (d, d))


def isotropic_state(d: int, fidelity: float) -> HermitianOperator:
    """Isotropic state with ``Tr[Phi rho] = fidelity``."""
    if not 0.0 <= fidelity <= 1.0:
        raise DomainError(f"fidelity must lie in [0, 1], got {fidelity}")
    return isotropic_operator(IsotropicCoordinates(d, fidelity, 1.0 - fidelity))


def basis_projector(index: int, dim: int, dims=None) -> HermitianOperator:
    m = np.zeros((dim, dim), dtype=complex)
    m[index, index] = 1.0
    return HermitianOperator(m, dims)


def product_state(psi_a, psi_b) -> HermitianOperator:
    """``|a><a| (x) |b><b|`` for (unnormalized) vectors ``a``, ``b``."""
    a = np.asarray(psi_a, dtype=complex)
    b = np.asarray(psi_b, dtype=complex)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    v = np.kron(a, b)
    return HermitianOperator(np.outer(v, v.conj()), (a.size, b.size))


def bipartite_tensor(rho1, rho2) -> HermitianOperator:
    """``rho1 (x) rho2`` on ``A1 B1 A2 B2`` reordered to ``(A1 A2) : (B1 B2)``."""
    (a1, b1), (a2, b2) = rho1.dims, rho2.dims
    t = np.kron(rho1.data, rho2.data).reshape(a1, b1, a2, b2, a1, b1, a2, b2)
    t = t.transpose(0, 2, 1, 3, 4, 6, 5, 7)
    n = a1 * b1 * a2 * b2
    return HermitianOperator(t.reshape(n, n), (a1 * a2, b1 * b2))


def bipartite_power(rho, n: int) -> HermitianOperator:
    """``rho^{(x) n}`` with all A factors first, then all B factors."""
    if n < 1:
        raise DomainError("n must be >= 1")
    out = rho
    for _ in range(n - 1):
        out = bipartite_tensor(out, rho)
    return out


def _ginibre(rng, rows, cols):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_density(dim: int, rank: int = None, seed=None, dims=None) -> HermitianOperator:
    """Random density operator ``G G^H / Tr[G G^H]`` with ``G`` a complex
    Gaussian ``dim x rank`` matrix (full rank by default)."""
    dim = _check_d(dim)
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise DomainError(f"rank must lie in [1, {dim}], got {rank}")
    if dims is not None and dims[0] * dims[1] != dim:
        raise DimensionError(f"dims {dims} incompatible with dim {dim}")
    g = _ginibre(make_rng(seed), dim, rank)
    rho = g @ g.conj().T
    return HermitianOperator(rho / np.trace(rho).real, dims)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary: QR of a Ginibre matrix with R's diagonal phases
    divided out."""
    d = _check_d(d)
    z = _ginibre(make_rng(seed), d, d)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    phases = diag / np.abs(diag)
    return q * phases
