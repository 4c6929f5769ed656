import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entlaw import _kernels
from entlaw.linalg import hermitian_eig

from .conftest import random_hermitian

BACKENDS = sorted(_kernels.BACKENDS)


def test_compiled_backend_available():
    # the extension is built by the editable install; the fallback must still exist
    assert "python" in _kernels.BACKENDS
    assert _kernels.BACKEND in _kernels.BACKENDS


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("n", [1, 2, 3, 9, 16])
def test_backend_spectrum(backend, n, rng):
    m = random_hermitian(rng, n)
    e = hermitian_eig(m, backend=backend)
    assert np.allclose(e.values, np.sort(np.linalg.eigvalsh(m))[::-1], atol=1e-12)
    assert np.allclose(e.reconstruct(), m, atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_backend_real_symmetric_and_diagonal(backend):
    d = np.diag([3.0, -1.0, 2.0])
    assert np.array_equal(hermitian_eig(d, backend=backend).values, [3.0, 2.0, -1.0])
    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    assert np.allclose(hermitian_eig(a, backend=backend).values, [3.0, 1.0], atol=1e-14)


@pytest.mark.parametrize("backend", BACKENDS)
def test_backend_tiny_pivots(backend):
    m = np.diag([1.0, 1.0 + 1e-15, 2.0]).astype(complex)
    m[0, 1] = m[1, 0] = 1e-300
    e = hermitian_eig(m, backend=backend)
    assert np.allclose(e.reconstruct(), m, atol=1e-14)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel not built")
@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_backends_agree(n, seed):
    m = random_hermitian(np.random.default_rng(seed), n)
    a = hermitian_eig(m, backend="compiled")
    b = hermitian_eig(m, backend="python")
    assert np.allclose(a.values, b.values, atol=1e-12)
