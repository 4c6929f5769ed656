import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entlaw.sdp import (
    ProblemBuilder,
    SdpStatus,
    check_certificate,
    complex_embed,
    complex_unembed,
    dump_problem,
    hermitian_basis,
    load_problem,
    recording,
    solve,
)

from .conftest import random_hermitian


def _max_eig_problem(c):
    n = c.shape[0]
    pb = ProblemBuilder()
    x = pb.block(n)
    pb.objective(x, c)
    pb.constraint({x: np.eye(n)}, 1.0)
    return pb.build("max")


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_max_eigenvalue(n, seed):
    c = random_hermitian(np.random.default_rng(seed), n).real
    sol = solve(_max_eig_problem(c), tol=1e-10)
    assert sol.optimal
    assert sol.primal_obj == pytest.approx(np.linalg.eigvalsh(c)[-1], abs=1e-8)


def test_lovasz_theta_of_pentagon():
    # theta(C5) = sqrt(5)
    pb = ProblemBuilder()
    x = pb.block(5)
    pb.objective(x, np.ones((5, 5)))
    pb.constraint({x: np.eye(5)}, 1.0)
    for i in range(5):
        e = np.zeros((5, 5))
        j = (i + 1) % 5
        e[i, j] = e[j, i] = 1.0
        pb.constraint({x: e}, 0.0)
    sol = solve(pb.build("max"), tol=1e-10)
    assert sol.primal_obj == pytest.approx(math.sqrt(5), abs=1e-8)


def test_multiblock_lp():
    # min x + 2y  s.t.  x + y = 1  (1x1 blocks)
    pb = ProblemBuilder()
    x, y = pb.block(1), pb.block(1)
    pb.objective(x, [[1.0]])
    pb.objective(y, [[2.0]])
    pb.constraint({x: [[1.0]], y: [[1.0]]}, 1.0)
    prob = pb.build()
    sol = solve(prob, tol=1e-10)
    assert sol.primal_obj == pytest.approx(1.0, abs=1e-9)
    cert = check_certificate(prob, sol)
    assert cert.passes(1e-8)


def test_infeasible_detected():
    pb = ProblemBuilder()
    x = pb.block(1)
    pb.objective(x, [[1.0]])
    pb.constraint({x: [[1.0]]}, -1.0)
    sol = solve(pb.build())
    assert not sol.optimal
    assert sol.status in (SdpStatus.INFEASIBLE, SdpStatus.NUMERICAL_FAILURE)


def test_builder_validation():
    pb = ProblemBuilder()
    x = pb.block(1)
    pb.constraint({x: [[1.0]]}, 1.0)
    pb.constraint({x: [[2.0]]}, 2.0)
    with pytest.raises(ValueError):
        pb.build()
    with pytest.raises(ValueError):
        ProblemBuilder().build("sideways")
    pb = ProblemBuilder()
    x = pb.block(2)
    pb.objective(x, [[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        pb.build()


def test_complex_embedding(rng):
    h = random_hermitian(rng, 3)
    e = complex_embed(h)
    assert e.shape == (6, 6)
    assert np.allclose(e, e.T)
    assert np.allclose(complex_unembed(e), h)
    # spectrum doubles
    assert np.allclose(np.sort(np.linalg.eigvalsh(e)), np.sort(np.repeat(np.linalg.eigvalsh(h), 2)))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_hermitian_basis_orthonormal(n):
    basis = hermitian_basis(n)
    assert len(basis) == n * n
    g = np.array([[np.vdot(a, b).real for b in basis] for a in basis])
    assert np.allclose(g, np.eye(n * n), atol=1e-14)


def test_dump_load_roundtrip(tmp_path):
    prob = _max_eig_problem(np.array([[1.0, 0.5], [0.5, -1.0]]))
    path = tmp_path / "p.dat-s"
    dump_problem(prob, path)
    back = load_problem(path)
    assert back.sense == prob.sense
    assert back.blocks == prob.blocks
    assert np.allclose(back.b, prob.b)
    assert solve(back).primal_obj == pytest.approx(solve(prob).primal_obj, abs=1e-8)


def test_recording_collects_solves():
    prob = _max_eig_problem(np.eye(2))
    with recording() as log:
        solve(prob)
        solve(prob)
    solve(prob)
    assert len(log) == 2
