import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entlaw import channels as ch
from entlaw.errors import DimensionError, DomainError
from entlaw.secondlaw import (
    BOUND_TOL,
    ErrorBudget,
    build_protocols,
    correction_term,
    library_specs,
    rains_soundness,
    run_protocols,
    simulate_quasi_cyclic,
    sine_composition_check,
    small_eps_expansion_check,
    tensor_power_trend,
    trace_distance_lemma_check,
    trace_distance_lemma_sides,
)
from entlaw.states import isotropic_state, max_entangled, random_density

unit = st.floats(0.0, 1.0)


def test_budget_combination():
    b = ErrorBudget(0.04, 0.09, "fidelity")
    assert b.eps_combined == pytest.approx(0.25)
    t = ErrorBudget(0.04, 0.09, "trace")
    assert t.eps_combined == pytest.approx(0.13)
    assert ErrorBudget(0.5, 0.5, "trace").is_vacuous
    assert ErrorBudget(0.25, 0.25, "fidelity").is_vacuous
    with pytest.raises(DomainError):
        ErrorBudget(0.1, 0.1, "other")
    with pytest.raises(DomainError):
        ErrorBudget(-0.1, 0.1)


def test_correction_term_values():
    assert correction_term(ErrorBudget(0.0, 0.0)) == 0.0
    assert correction_term(ErrorBudget(0.25, 0.25, "trace")) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        correction_term(ErrorBudget(0.6, 0.6, "trace"))


@pytest.mark.parametrize("x", [1e-6, 1e-4, 1e-3])
def test_small_eps_correction_is_linear(x):
    # log2(1/(1 - x)) = x / ln 2 + O(x^2)
    exact, linear = small_eps_expansion_check(x)
    assert abs(exact - linear) <= x * x


def test_correction_blows_up_near_one():
    # with eps' close to 1 the correction dwarfs any fixed rate gap
    assert correction_term(ErrorBudget(0.999999, 0.0, "trace")) > 19.9


@given(unit, unit)
def test_fidelity_budget_dominates_trace_budget(a, b):
    # (sqrt a + sqrt b)^2 >= a + b
    assert ErrorBudget(a, b, "fidelity").eps_combined >= ErrorBudget(a, b, "trace").eps_combined - 1e-15


@pytest.mark.parametrize("mode", ["fidelity", "trace"])
@pytest.mark.parametrize("d", [2, 3])
def test_identity_cycle_is_tight(mode, d):
    idc = ch.identity_channel(d)
    rep = simulate_quasi_cyclic(idc, idc, max_entangled(d), d, d, mode)
    assert rep.status == "holds"
    assert rep.lhs_bits == pytest.approx(rep.rhs_bits, abs=1e-12)
    assert rep.measured_eps1 <= 1e-12 and rep.measured_eps2 <= 1e-12


def test_overambitious_enlargement_meets_bound_exactly():
    # Phi^2 embedded in 4 x 4 has fidelity 1/2 with Phi^4, so the fidelity
    # bound 2 <= 1 + log2(1 / (1 - 1/2)) holds with equality
    proto = build_protocols({"d_in": 2, "distillation": "local_resize", "d_out": 4})[0]
    rep = proto.run("fidelity")
    assert rep.measured_eps2 == pytest.approx(0.5, abs=1e-12)
    assert rep.rhs_bits == pytest.approx(rep.lhs_bits, abs=1e-9)
    assert rep.status == "holds"
    # in trace mode the error is sqrt(1/2) and the bound has slack
    rep = proto.run("trace")
    assert rep.measured_eps2 == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert rep.rhs_bits > rep.lhs_bits


def test_noisy_dilution_fidelity_values():
    # dilution_p = p gives F = 1 - p + p/d^2
    rep = build_protocols({"d_in": 2, "dilution": "isotropic_noise", "dilution_p": 0.2})[0].run("fidelity")
    assert rep.measured_eps1 <= 1e-12
    assert rep.measured_eps2 == pytest.approx(0.2 * (1 - 1 / 4), abs=1e-12)
    assert rep.status == "holds"


def test_vacuous_row():
    rep = build_protocols({"d_in": 2, "target": "isotropic", "target_fidelity": 0.0})[0].run("fidelity")
    assert rep.status == "vacuous"
    assert math.isinf(rep.rhs_bits)


def test_library_size_and_zero_violations():
    protos = [p for s in library_specs() for p in build_protocols(s)]
    assert len(protos) >= 50
    for mode in ("fidelity", "trace"):
        reps = run_protocols(protos, mode)
        assert not [r.label for r in reps if r.status == "violated"]
        assert all(r.composition_holds for r in reps)


def test_simulate_validates_dimensions():
    idc = ch.identity_channel(2)
    with pytest.raises(DimensionError):
        simulate_quasi_cyclic(idc, idc, max_entangled(2), 3, 2)
    with pytest.raises(DimensionError):
        simulate_quasi_cyclic(idc, idc, max_entangled(2), 2, 3)
    with pytest.raises(DomainError):
        simulate_quasi_cyclic(idc, idc, max_entangled(2), 2, 2, "neither")


def test_build_protocols_grid_and_errors():
    protos = build_protocols({"d_in": [2, 3], "dilution": "isotropic_noise", "dilution_p": [0.0, 0.1]})
    assert len(protos) == 4
    with pytest.raises(DomainError):
        build_protocols({"d_in": 2, "dilution": "teleport"})
    with pytest.raises(DomainError):
        build_protocols({"d_in": 2, "target": "nonsense"})


@given(st.integers(2, 3), st.integers(0, 2**32 - 1))
def test_sine_composition_property(d, seed):
    rng = np.random.default_rng(seed)
    states = [random_density(d * d, rank=int(rng.integers(1, d * d + 1)), seed=rng) for _ in range(3)]
    assert sine_composition_check(*states)


@given(st.integers(2, 3), st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_trace_distance_lemma_property(d, seed, mix):
    # states near Phi stress the lemma where it is close to tight
    noise = random_density(d * d, seed=seed)
    omega = (1 - mix) * max_entangled(d).data + mix * noise.data
    assert trace_distance_lemma_check(omega, d)
    dist, succ = trace_distance_lemma_sides(omega, d)
    assert -1e-12 <= dist <= 1.0 + 1e-12 and -1e-12 <= succ <= 1.0 + 1e-12


def test_trace_distance_lemma_tight_on_isotropic():
    # for isotropic states the distance equals 1 - F exactly
    dist, succ = trace_distance_lemma_sides(isotropic_state(3, 0.7), 3)
    assert dist == pytest.approx(1 - succ, abs=1e-12)


@pytest.mark.parametrize(
    "spec",
    [
        {"d_in": 2, "dilution": "isotropic_noise", "dilution_p": 0.1},
        {"d_in": 2, "dilution": "local_dephasing", "dilution_p": 0.3},
        {"d_in": 3, "distillation": "local_resize", "d_out": 2},
    ],
)
def test_rains_soundness(spec):
    lhs, r, eps, holds = rains_soundness(build_protocols(spec)[0])
    assert holds
    assert lhs <= r + 1e-6


def test_tensor_power_trend_cross_checks():
    rows = tensor_power_trend(2, 0.9, 0.1, ns=(1, 2))
    for n, value, per_copy, sdp in rows:
        assert per_copy == pytest.approx(value / n)
        assert sdp == pytest.approx(value, abs=1e-8)
