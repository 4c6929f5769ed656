import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entlaw.errors import DimensionError, InvalidStateError
from entlaw.metrics import fidelity, sine_distance, trace_distance
from entlaw.states import isotropic_state, max_entangled, maximally_mixed, random_density

from .frozen import FIDELITY_RANDOM


@pytest.mark.parametrize("key", sorted(FIDELITY_RANDOM))
def test_fidelity_frozen(key):
    seed, n = key
    omega = random_density(n, seed=seed)
    tau = random_density(n, seed=100 + seed)
    assert fidelity(omega, tau) == pytest.approx(FIDELITY_RANDOM[key], abs=1e-13)


@given(st.integers(2, 6), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_fidelity_rank_deficient_matches_projected_formula(n, rank, seed):
    # tau = V diag(t) V^H with exact rank r: F = (Tr |sqrt(omega) V sqrt(t)|)^2
    rng = np.random.default_rng(seed)
    rank = min(rank, n)
    omega = random_density(n, seed=rng)
    v = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))[0][:, :rank]
    t = rng.random(rank) + 0.1
    t /= t.sum()
    tau = (v * t) @ v.conj().T
    w, u = np.linalg.eigh(omega.data)
    x = (u * np.sqrt(np.clip(w, 0, None))) @ u.conj().T @ v * np.sqrt(t)
    ref = np.linalg.svd(x, compute_uv=False).sum() ** 2
    assert fidelity(omega, tau) == pytest.approx(ref, abs=1e-12)


def test_fidelity_pure_and_isotropic():
    phi = max_entangled(3)
    assert fidelity(phi, phi) == 1.0
    assert fidelity(phi, isotropic_state(3, 0.7)) == pytest.approx(0.7, abs=1e-14)
    assert fidelity(phi, maximally_mixed(3)) == pytest.approx(1 / 9, abs=1e-14)


def test_commuting_fidelity_is_classical():
    p = np.array([0.5, 0.3, 0.2])
    q = np.array([0.1, 0.1, 0.8])
    ref = np.sum(np.sqrt(p * q)) ** 2
    assert fidelity(np.diag(p), np.diag(q)) == pytest.approx(ref, abs=1e-13)
    assert trace_distance(np.diag(p), np.diag(q)) == pytest.approx(0.6, abs=1e-14)


def test_validation():
    with pytest.raises(DimensionError):
        fidelity(max_entangled(2), max_entangled(3))
    with pytest.raises(InvalidStateError):
        fidelity(np.diag([1.5, -0.5]), np.eye(2) / 2)
    with pytest.raises(InvalidStateError):
        fidelity(np.eye(2), np.eye(2) / 2)


@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_distance_properties(n, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_density(n, rank=int(rng.integers(1, n + 1)), seed=rng) for _ in range(3))
    f = fidelity(a, b)
    assert 0.0 <= f <= 1.0
    assert f == pytest.approx(fidelity(b, a), abs=1e-9)
    assert fidelity(a, a) == pytest.approx(1.0, abs=1e-9)
    t = trace_distance(a, b)
    # Fuchs-van de Graaf
    assert 1 - math.sqrt(f) <= t + 1e-9
    assert t <= math.sqrt(1 - f) + 1e-9
    assert sine_distance(a, c) <= sine_distance(a, b) + sine_distance(b, c) + 1e-9
    assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-12
