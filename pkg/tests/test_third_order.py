import numpy as np
import pytest
from hypothesis import given, strategies as st

from vibronic_response.coherent import kinematic_response, run_pathway
from vibronic_response.general import build_exponent, evaluate
from vibronic_response.model import (
    KINDS_WITH_DOUBLES,
    THIRD_ORDER_KINDS,
    VibronicModel,
    electronic_prefactor,
    third_order_pathway,
)
from vibronic_response.third_order import TABLES, full_response3, h_of_z, r_phi_decomposition, r_v3

# reference values from the number-basis oracle at n_max = 96
KIND2_TWO_LEVEL = 0.8461283814202062 + 0.07371398510886618j  # z1 = 0.4, t = (1, 2, 0.5)
KIND3_XI = -0.06951820700475811 - 0.15911492866818752j  # z = (0.4, -0.7), t = (0.7, 1.9, 2.6)

kinds = st.sampled_from(THIRD_ORDER_KINDS)
zs = st.tuples(st.floats(-1, 1), st.floats(-1, 1))
times3 = st.tuples(*[st.floats(0, 4 * np.pi)] * 3)


def levels_for(kind):
    return (1, 1, 2) if kind in KINDS_WITH_DOUBLES else (1, 2)


def test_reference_values():
    assert abs(r_v3(2, (1, 1), (0, 0.4), (1.0, 2.0, 0.5)) - KIND2_TWO_LEVEL) < 1e-10
    assert abs(r_v3(3, (1, 1, 2), (0, 0.4, -0.7), (0.7, 1.9, 2.6)) - KIND3_XI) < 1e-10


def test_tables_have_six_terms():
    for kind in THIRD_ORDER_KINDS:
        assert len(TABLES[kind]) == 6


@given(kinds, zs)
def test_unity_at_zero_time(kind, z):
    assert r_v3(kind, levels_for(kind), (0, *z), (0, 0, 0)) == pytest.approx(1, abs=1e-15)


@given(kinds, times3)
def test_unity_at_zero_displacement(kind, t):
    assert r_v3(kind, levels_for(kind), (0, 0, 0), t) == 1


@given(kinds, zs, times3)
def test_closed_form_equals_ladder(kind, z, t):
    model = VibronicModel.single_mode([0, 0, 0], (0, *z))
    p = third_order_pathway(kind, levels_for(kind))
    assert abs(r_v3(kind, levels_for(kind), model.z, t) - kinematic_response(model, p, t)) < 1e-12


@given(kinds, zs, times3)
def test_closed_form_equals_recipe(kind, z, t):
    model = VibronicModel.single_mode([0, 0, 0], (0, *z))
    p = third_order_pathway(kind, levels_for(kind))
    assert abs(r_v3(kind, levels_for(kind), model.z, t) - evaluate(build_exponent(model, p), t)) < 1e-12


@given(kinds, zs, times3)
def test_modulus_at_most_one(kind, z, t):
    assert abs(r_v3(kind, levels_for(kind), (0, *z), t)) <= 1 + 1e-14


@given(kinds, zs, times3)
def test_r_phi(kind, z, t):
    r, phi = r_phi_decomposition(kind, levels_for(kind), (0, *z), t)
    assert r <= 1e-15
    assert np.exp(r + 1j * phi) == pytest.approx(r_v3(kind, levels_for(kind), (0, *z), t), abs=1e-14)


def test_r_phi_zero_displacement():
    assert r_phi_decomposition(1, (1, 1), (0, 0), (1, 2, 3)) == (0, 0)


@given(st.floats(-1, 1), times3)
def test_kind_5_phase_is_ket_phase(z, t):
    model = VibronicModel.two_level(z)
    kets, bras = run_pathway(model, third_order_pathway(5, (1, 1)), t)
    _, phi = r_phi_decomposition(5, (1, 1), model.z, t)
    assert bras[-1].phase == 0
    # overlap with the bra vacuum adds no phase: <0|a> is real
    assert phi == pytest.approx(kets[-1].phase, abs=1e-12)


@given(zs, times3)
def test_kind_5_time_reversal_is_conjugation(z, t):
    levels = (1, 2)
    neg = tuple(-x for x in t)
    assert r_v3(5, levels, (0, *z), neg) == pytest.approx(np.conj(r_v3(5, levels, (0, *z), t)), abs=1e-14)


def test_esa_h():
    z1, z2 = 0.4, -0.7
    assert h_of_z(3, (1, 1, 2), (0, z1, z2)) == pytest.approx(2 * z1 * (z1 - z2) + z2 ** 2)


def test_full_response_two_level_is_single_product():
    model = VibronicModel.two_level(0.4, eps1=3.0)
    t = (0.4, 1.2, 0.9)
    expected = electronic_prefactor(model, 2, (1, 1), t) * r_v3(2, (1, 1), model.z, t)
    assert full_response3(model, 2, t) == pytest.approx(expected)


def test_full_response_at_zero_time_sums_constants():
    model = VibronicModel.v_scheme(0.4, -0.7)
    assert full_response3(model, 1, (0, 0, 0)) == pytest.approx(4 * (1j) ** 3)


def test_full_response_v_scheme_kind_1_four_terms():
    from vibronic_response.fock import brute_force_response
    model = VibronicModel.v_scheme(0.4, -0.7, eps=(2.0, 2.6))
    t = (0.5, 1.5, 2.5)
    total = 0j
    for j in (1, 2):
        for k in (1, 2):
            vib = brute_force_response(model, third_order_pathway(1, (j, k)), t)
            total += electronic_prefactor(model, 1, (j, k), t) * vib
    assert full_response3(model, 1, t) == pytest.approx(total, abs=1e-10)


@pytest.mark.parametrize("kind", (1, 2, 4, 5))
def test_two_level_against_general_order(kind):
    model = VibronicModel.two_level(0.6)
    t = (1.1, 0.3, 2.7)
    p = third_order_pathway(kind, (1, 1))
    assert r_v3(kind, (1, 1), model.z, t) == pytest.approx(evaluate(build_exponent(model, p), t), abs=1e-13)
