import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entlaw.channels import random_kraus_channel
from entlaw.errors import DimensionError, DomainError, InvalidStateError
from entlaw.hyptest import dh_lp_oracle, dh_neyman_pearson, dh_sdp, dh_sdp_solve
from entlaw.sdp import check_certificate
from entlaw.states import max_entangled, maximally_mixed, random_density

from .frozen import DH_RANDOM

eps_st = st.floats(0.01, 0.99)


def _pair(key):
    seed, n, _ = key
    return random_density(n, seed=seed), random_density(n, seed=100 + seed)


@pytest.mark.parametrize("key", sorted(DH_RANDOM))
def test_neyman_pearson_frozen(key):
    omega, tau = _pair(key)
    res = dh_neyman_pearson(omega, tau, key[2])
    assert res.value_bits == pytest.approx(DH_RANDOM[key], abs=1e-9)
    assert res.achieved_type1 == pytest.approx(1 - key[2], abs=1e-9)


@pytest.mark.parametrize("key", sorted(DH_RANDOM))
def test_sdp_frozen(key):
    omega, tau = _pair(key)
    value, prob, sol = dh_sdp_solve(omega, tau, key[2])
    assert value == pytest.approx(DH_RANDOM[key], abs=1e-8)
    assert check_certificate(prob, sol).passes(1e-8)


def test_bell_against_maximally_mixed():
    phi = max_entangled(2)
    mm = maximally_mixed(2)
    assert dh_neyman_pearson(phi, mm, 0.0).value_bits == pytest.approx(2.0, abs=1e-12)
    assert dh_lp_oracle([1, 0, 0, 0], [0.25] * 4, 0.0) == pytest.approx(2.0)
    # eps = 1/2: half the Phi direction, type-II 1/8
    assert dh_neyman_pearson(phi, mm, 0.5).value_bits == pytest.approx(3.0, abs=1e-9)


def test_infinite_cases():
    phi = max_entangled(2)
    assert dh_neyman_pearson(phi, maximally_mixed(2), 1.0).is_infinite
    assert dh_neyman_pearson(phi, np.zeros((4, 4)), 0.3).is_infinite
    # omega orthogonal to tau
    res = dh_neyman_pearson(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), 0.2)
    assert res.is_infinite
    assert res.achieved_type1 == pytest.approx(0.8)
    assert dh_lp_oracle([1, 0], [0, 1], 0.2) == math.inf
    assert dh_lp_oracle([1, 0], [1, 0], 1.0) == math.inf


def test_partial_kernel_weight():
    # omega puts 0.3 outside supp(tau); eps = 0.5 is reachable on the kernel alone
    omega = np.diag([0.7, 0.3])
    tau = np.diag([1.0, 0.0])
    assert dh_neyman_pearson(omega, tau, 0.75).is_infinite
    res = dh_neyman_pearson(omega, tau, 0.5)
    assert res.value_bits == pytest.approx(-math.log2(0.2 / 0.7), abs=1e-9)


def test_validation():
    with pytest.raises(DomainError):
        dh_neyman_pearson(max_entangled(2), maximally_mixed(2), 1.5)
    with pytest.raises(DimensionError):
        dh_neyman_pearson(max_entangled(2), maximally_mixed(3), 0.1)
    with pytest.raises(InvalidStateError):
        dh_neyman_pearson(2 * max_entangled(2).data, maximally_mixed(2), 0.1)
    with pytest.raises(InvalidStateError):
        dh_neyman_pearson(max_entangled(2), -maximally_mixed(2).data, 0.1)
    with pytest.raises(DomainError):
        dh_sdp(max_entangled(2), maximally_mixed(2), 0.0)
    with pytest.raises(DomainError):
        dh_lp_oracle([0.5, 0.6], [1, 1], 0.1)
    with pytest.raises(DomainError):
        dh_lp_oracle([0.5, 0.5], [1, -1], 0.1)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1), eps_st)
def test_commuting_case_matches_lp(n, seed, eps):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(n))
    q = rng.dirichlet(np.ones(n)) * rng.uniform(0.5, 2.0)
    res = dh_neyman_pearson(np.diag(p), np.diag(q), eps)
    assert res.value_bits == pytest.approx(dh_lp_oracle(p, q, eps), abs=1e-9)


@given(st.integers(2, 5), st.integers(0, 2**32 - 1), eps_st)
def test_optimal_test_is_feasible(n, seed, eps):
    omega = random_density(n, rank=max(1, n - 1), seed=seed)
    tau = random_density(n, seed=seed + 1)
    res = dh_neyman_pearson(omega, tau, eps)
    w = np.linalg.eigvalsh(res.optimal_test.data)
    assert w.min() > -1e-10 and w.max() < 1 + 1e-10
    assert res.achieved_type1 == pytest.approx(1 - eps, abs=1e-9)
    assert res.type2 == pytest.approx(2.0 ** -res.value_bits, rel=1e-12)


@given(st.integers(2, 4), st.integers(0, 2**32 - 1), eps_st, eps_st)
def test_monotone_in_eps(n, seed, e1, e2):
    omega = random_density(n, seed=seed)
    tau = random_density(n, seed=seed + 1)
    lo, hi = sorted((e1, e2))
    assert dh_neyman_pearson(omega, tau, lo).value_bits <= dh_neyman_pearson(omega, tau, hi).value_bits + 1e-9


@given(st.integers(2, 4), st.integers(0, 2**32 - 1), eps_st)
def test_data_processing(n, seed, eps):
    omega = random_density(n, seed=seed)
    tau = random_density(n, seed=seed + 1)
    ch = random_kraus_channel(n, 2, seed=seed + 2)
    before = dh_neyman_pearson(omega, tau, eps).value_bits
    after = dh_neyman_pearson(ch(omega), ch(tau), eps).value_bits
    assert after <= before + 1e-9


@given(st.integers(1, 4), st.integers(0, 2**32 - 1), eps_st, st.floats(0.1, 10.0))
def test_self_value_and_scaling(n, seed, eps, c):
    omega = random_density(n, seed=seed)
    assert dh_neyman_pearson(omega, omega, eps).value_bits == pytest.approx(math.log2(1 / (1 - eps)), abs=1e-9)
    tau = random_density(n, seed=seed + 1)
    base = dh_neyman_pearson(omega, tau, eps).value_bits
    scaled = dh_neyman_pearson(omega, c * tau.data, eps).value_bits
    assert scaled == pytest.approx(base - math.log2(c), abs=1e-9)


@pytest.mark.parametrize("seed,n,eps", [(1, 2, 0.1), (2, 3, 0.5), (3, 4, 0.3)])
def test_inequality_and_equality_forms_agree(seed, n, eps):
    from entlaw.sdp import ProblemBuilder, complex_embed, hermitian_basis, solve

    omega = random_density(n, seed=seed)
    tau = random_density(n, seed=seed + 50)
    pb = ProblemBuilder()
    lam, comp, slack = pb.block(2 * n), pb.block(2 * n), pb.block(1)
    pb.objective(lam, complex_embed(tau) / 2)
    # Tr[L omega] - s = 1 - eps with s >= 0
    pb.constraint({lam: complex_embed(omega) / 2, slack: [[-1.0]]}, 1 - eps)
    for e in hermitian_basis(n):
        emb = complex_embed(e) / 2
        pb.constraint({lam: emb, comp: emb}, np.trace(e).real)
    sol = solve(pb.build(), tol=1e-11)
    assert sol.optimal
    assert -math.log2(sol.primal_obj) == pytest.approx(dh_neyman_pearson(omega, tau, eps).value_bits, abs=1e-8)
