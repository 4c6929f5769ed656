import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entlaw.errors import DimensionError, InvalidStateError, NotHermitianError, NumericalFailure, ResourceLimitError
from entlaw.linalg import (
    HermitianOperator,
    frobenius_norm,
    hermitian_eig,
    inner_product,
    matrix_sqrt_psd,
    operator_norm,
    partial_trace_A,
    partial_trace_B,
    partial_transpose_B,
    positive_part,
    tensor_product,
    trace_norm,
)
from entlaw.states import max_entangled, random_density, swap_operator

from .conftest import random_hermitian


def test_symmetrizes_tiny_defect():
    m = np.array([[1.0, 1e-14], [0.0, 2.0]])
    op = HermitianOperator(m)
    assert np.allclose(op.data, op.data.conj().T, atol=0)


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        HermitianOperator([[1.0, 1.0], [0.0, 1.0]])


@pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.zeros(4)])
def test_rejects_non_square(bad):
    with pytest.raises(DimensionError):
        HermitianOperator(bad)


def test_rejects_nan():
    with pytest.raises(ValueError):
        HermitianOperator([[np.nan, 0], [0, 1]])


def test_dims_must_factor():
    with pytest.raises(DimensionError):
        HermitianOperator(np.eye(4), (3, 2))


def test_immutable():
    op = HermitianOperator(np.eye(2))
    with pytest.raises(ValueError):
        op.data[0, 0] = 5.0


def test_tensor_product_limit():
    with pytest.raises(ResourceLimitError):
        tensor_product(np.eye(40), np.eye(40))


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_eig_matches_lapack(rng, n):
    m = random_hermitian(rng, n)
    e = hermitian_eig(m)
    assert np.allclose(e.values, np.sort(np.linalg.eigvalsh(m))[::-1], atol=1e-12)
    assert np.allclose(e.reconstruct(), m, atol=1e-12)
    assert np.allclose(e.vectors.conj().T @ e.vectors, np.eye(n), atol=1e-12)


def test_eig_degenerate_and_zero():
    assert np.all(hermitian_eig(np.zeros((3, 3))).values == 0)
    f = swap_operator(3)
    w = hermitian_eig(f).values
    assert np.allclose(w, [1] * 6 + [-1] * 3, atol=1e-13)


def test_eig_nonconvergence_reports_residual(monkeypatch):
    import entlaw.linalg as la

    monkeypatch.setattr(la, "JACOBI_MAX_SWEEPS", 0)
    with pytest.raises(NumericalFailure) as exc:
        la.hermitian_eig(np.array([[1.0, 0.5], [0.5, 2.0]]))
    assert exc.value.residual > 0


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_eig_reconstruction_property(n, seed):
    m = random_hermitian(np.random.default_rng(seed), n)
    e = hermitian_eig(m)
    assert np.all(np.diff(e.values) <= 0)
    assert np.allclose(e.reconstruct(), m, atol=1e-11 * max(1.0, np.abs(m).max()))


def test_partial_transpose_of_phi_is_swap_over_d():
    for d in (2, 3, 4):
        assert partial_transpose_B(max_entangled(d)).allclose(swap_operator(d).data / d)


@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_partial_operations_properties(da, db, seed):
    rho = random_density(da * db, seed=seed, dims=(da, db))
    pt = partial_transpose_B(rho)
    assert partial_transpose_B(pt).allclose(rho.data)
    assert abs(pt.trace() - 1.0) < 1e-12
    assert abs(partial_trace_B(rho).trace() - 1.0) < 1e-12
    assert partial_trace_A(rho).dim == db


def test_partial_trace_of_product():
    a = random_density(2, seed=1)
    b = random_density(3, seed=2)
    ab = tensor_product(a, b)
    assert partial_trace_B(ab).allclose(a.data)
    assert partial_trace_A(ab).allclose(b.data)


def test_norms(rng):
    m = random_hermitian(rng, 5)
    s = np.linalg.svd(m, compute_uv=False)
    assert trace_norm(m) == pytest.approx(s.sum(), abs=1e-12)
    assert operator_norm(m) == pytest.approx(s.max(), abs=1e-12)
    assert frobenius_norm(m) == pytest.approx(np.sqrt((s**2).sum()), abs=1e-12)
    assert inner_product(m, m).real == pytest.approx(frobenius_norm(m) ** 2)


def test_matrix_sqrt_and_positive_part(rng):
    rho = random_density(4, seed=3)
    r = matrix_sqrt_psd(rho)
    assert np.allclose(r.data @ r.data, rho.data, atol=1e-12)
    with pytest.raises(InvalidStateError):
        matrix_sqrt_psd(-rho)
    m = random_hermitian(rng, 4)
    pos, proj = positive_part(m)
    neg = pos.data - m
    assert np.linalg.eigvalsh(neg).min() > -1e-12
    assert np.allclose(proj.data @ proj.data, proj.data, atol=1e-12)
