"""Dense complex linear algebra kernel.

Everything downstream works with :class:`HermitianOperator`, an immutable
wrapper around a complex ``ndarray`` that optionally records a bipartite
split ``dims = (dA, dB)``. The product basis is ``|i>_A |j>_B`` at flat
index ``i * dB + j``.

Eigendecompositions use a cyclic Jacobi solver (compiled when available, see
:mod:`entlaw._kernels`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import _kernels
from .errors import (
    DimensionError,
    InvalidStateError,
    NotHermitianError,
    NumericalFailure,
    ResourceLimitError,
)

MAX_DIM = 1024
HERMITIAN_TOL = 1e-12
DEGENERACY_TOL = 1e-10
PSD_TOL = 1e-10
JACOBI_REL_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100

__all__ = [
    "EigenDecomposition",
    "HermitianOperator",
    "as_operator",
    "frobenius_norm",
    "hermitian_eig",
    "inner_product",
    "matrix_sqrt_psd",
    "operator_norm",
    "partial_trace_A",
    "partial_trace_B",
    "partial_transpose_B",
    "positive_part",
    "tensor_product",
    "trace_norm",
]


class HermitianOperator:
    """Immutable dense Hermitian matrix with optional bipartite dimensions.

    The input is symmetrized as ``(M + M^H) / 2`` when its Hermiticity defect
    is within ``HERMITIAN_TOL`` (relative to ``max(1, max|M_ij|)``), and
    rejected otherwise.

    Parameters
    ----------
    data : array_like
        Square complex matrix.
    dims : tuple of int, optional
        ``(dA, dB)`` with ``dA * dB`` equal to the matrix dimension.
    """

    __slots__ = ("_data", "dims", "_eig")

    def __init__(self, data, dims: Optional[Tuple[int, int]] = None):
        m = np.array(data, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix has non-finite entries")
        n = m.shape[0]
        if n:
            mh = m.conj().T
            defect = float(np.max(np.abs(m - mh)))
            scale = max(1.0, float(np.max(np.abs(m))))
            if defect > HERMITIAN_TOL * scale:
                raise NotHermitianError(f"Hermiticity defect {defect:.3e} exceeds tolerance")
            m = 0.5 * (m + mh)
        m.setflags(write=False)
        if dims is not None:
            dims = (int(dims[0]), int(dims[1]))
            if dims[0] < 1 or dims[1] < 1 or dims[0] * dims[1] != n:
                raise DimensionError(f"dims {dims} incompatible with dimension {n}")
        self._data = m
        self.dims = dims
        self._eig = None

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    @property
    def is_bipartite(self) -> bool:
        return self.dims is not None

    def trace(self) -> float:
        return float(np.trace(self._data).real)

    def with_dims(self, dims) -> "HermitianOperator":
        return HermitianOperator(self._data, dims)

    def _coerce(self, other):
        if isinstance(other, HermitianOperator):
            if other.dim != self.dim:
                raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other._data
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return HermitianOperator(self._data + o, self.dims or other.dims)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return HermitianOperator(self._data - o, self.dims or other.dims)

    def __neg__(self):
        return HermitianOperator(-self._data, self.dims)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, np.floating, np.integer)):
            return HermitianOperator(float(scalar) * self._data, self.dims)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, (int, float, np.floating, np.integer)):
            return HermitianOperator(self._data / float(scalar), self.dims)
        return NotImplemented

    def __array__(self, dtype=None, copy=None):
        return np.array(self._data, dtype=dtype)

    def allclose(self, other, atol=1e-10) -> bool:
        other = other.data if isinstance(other, HermitianOperator) else np.asarray(other)
        return other.shape == self._data.shape and bool(np.allclose(self._data, other, rtol=0, atol=atol))

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim}, dims={self.dims})"


def as_operator(x, dims=None) -> HermitianOperator:
    """Return ``x`` as a :class:`HermitianOperator`, attaching ``dims`` if given."""
    if isinstance(x, HermitianOperator):
        if dims is None or tuple(dims) == x.dims:
            return x
        return x.with_dims(dims)
    return HermitianOperator(x, dims)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending with matching unitary eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T

    def projector(self, mask) -> np.ndarray:
        v = self.vectors[:, mask]
        return v @ v.conj().T


def _jacobi(m: np.ndarray, backend: Optional[str] = None) -> EigenDecomposition:
    n = m.shape[0]
    a = np.array(m, dtype=complex, order="C")
    v = np.eye(n, dtype=complex)
    fro = float(np.linalg.norm(a))
    if n == 0 or fro == 0.0:
        return EigenDecomposition(np.zeros(n), v, 0)
    kernel = _kernels.BACKENDS[backend] if backend else _kernels.jacobi_inplace
    threshold = JACOBI_REL_TOL * fro
    sweeps, off = kernel(a, v, threshold, JACOBI_MAX_SWEEPS)
    if off > threshold:
        raise NumericalFailure(
            f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-diagonal norm {off:.3e})",
            residual=off,
        )
    w = np.diagonal(a).real
    order = np.argsort(-w, kind="stable")
    vecs = v[:, order]
    vecs.setflags(write=False)
    vals = w[order].copy()
    vals.setflags(write=False)
    return EigenDecomposition(vals, vecs, sweeps)


def hermitian_eig(x, backend: Optional[str] = None) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian operator by cyclic Jacobi rotations.

    The result is cached on the operator (operators are immutable).
    ``backend`` selects ``"compiled"`` or ``"python"`` explicitly and bypasses
    the cache.

    Raises
    ------
    NumericalFailure
        If the off-diagonal norm is still above ``1e-13 * ||M||_F`` after 100
        sweeps; the exception carries the residual.
    """
    x = as_operator(x)
    if backend is not None:
        return _jacobi(x.data, backend)
    if x._eig is None:
        x._eig = _jacobi(x.data)
    return x._eig


def eigvalsh(x) -> np.ndarray:
    return hermitian_eig(x).values


def tensor_product(a, b, max_dim: int = MAX_DIM) -> HermitianOperator:
    """Kronecker product ``a (x) b`` carrying dims ``(a.dim, b.dim)``."""
    a = as_operator(a)
    b = as_operator(b)
    n = a.dim * b.dim
    if n > max_dim:
        raise ResourceLimitError(f"tensor product dimension {n} exceeds max_dim={max_dim}")
    return HermitianOperator(np.kron(a.data, b.data), (a.dim, b.dim))


def _require_dims(x: HermitianOperator) -> Tuple[int, int]:
    if x.dims is None:
        raise DimensionError("operation requires bipartite dims (dA, dB)")
    return x.dims


def partial_transpose_B(x) -> HermitianOperator:
    """Transpose the B tensor factor: ``<i j|T_B(X)|k l> = <i l|X|k j>``."""
    x = as_operator(x)
    da, db = _require_dims(x)
    m = x.data.reshape(da, db, da, db).transpose(0, 3, 2, 1).reshape(da * db, da * db)
    return HermitianOperator(m, x.dims)


def partial_trace_B(x) -> HermitianOperator:
    x = as_operator(x)
    da, db = _require_dims(x)
    return HermitianOperator(np.einsum("ijkj->ik", x.data.reshape(da, db, da, db)))


def partial_trace_A(x) -> HermitianOperator:
    x = as_operator(x)
    da, db = _require_dims(x)
    return HermitianOperator(np.einsum("ijil->jl", x.data.reshape(da, db, da, db)))


def trace_norm(x) -> float:
    """Schatten 1-norm: the sum of absolute eigenvalues."""
    return float(np.sum(np.abs(eigvalsh(x))))


def operator_norm(x) -> float:
    w = eigvalsh(x)
    return float(np.max(np.abs(w))) if w.size else 0.0


def frobenius_norm(x) -> float:
    return float(np.linalg.norm(as_operator(x).data))


def inner_product(a, b) -> complex:
    """Hilbert-Schmidt inner product ``Tr[A^H B]``."""
    a = a.data if isinstance(a, HermitianOperator) else np.asarray(a)
    b = b.data if isinstance(b, HermitianOperator) else np.asarray(b)
    return complex(np.vdot(a, b))


def matrix_sqrt_psd(x, tol: float = PSD_TOL) -> HermitianOperator:
    """Principal square root of a PSD operator.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero; anything more negative
    raises :class:`InvalidStateError`.
    """
    x = as_operator(x)
    eig = hermitian_eig(x)
    w = eig.values
    if w.size and w[-1] < -tol:
        raise InvalidStateError(f"operator is not PSD (min eigenvalue {w[-1]:.3e})")
    root = np.sqrt(np.clip(w, 0.0, None))
    return HermitianOperator((eig.vectors * root) @ eig.vectors.conj().T, x.dims)


def positive_part(x, tie_tol: float = DEGENERACY_TOL):
    """Split off the positive part.

    Returns
    -------
    (x_plus, proj)
        ``x_plus = V max(w, 0) V^H`` and the projector onto eigenvalues
        ``> tie_tol``.
    """
    x = as_operator(x)
    eig = hermitian_eig(x)
    w = eig.values
    pos = (eig.vectors * np.clip(w, 0.0, None)) @ eig.vectors.conj().T
    proj = eig.projector(w > tie_tol)
    return HermitianOperator(pos, x.dims), HermitianOperator(proj, x.dims)


def support_projector(x, tol: float = DEGENERACY_TOL) -> HermitianOperator:
    x = as_operator(x)
    eig = hermitian_eig(x)
    return HermitianOperator(eig.projector(eig.values > tol), x.dims)


def min_eigenvalue(x) -> float:
    w = eigvalsh(x)
    return float(w[-1]) if w.size else 0.0
