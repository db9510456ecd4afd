import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from vibronic_response.fock import (
    TruncationError,
    brute_force_response,
    coherent_vector,
    displacement,
    number_state,
    propagator,
    thermal_weights,
    unitarity_defect,
)
from vibronic_response.model import VibronicModel, third_order_pathway
from vibronic_response.thermal import temperature_for_occupation
from vibronic_response.third_order import r_v3


def test_undisplaced_propagator_is_diagonal():
    u = propagator(0.0, 1.7, n_max=8).entries
    assert np.allclose(u, np.diag(np.exp(-1j * 1.7 * np.arange(8))), atol=1e-15)
    # D(-z) D(z) is the identity away from the truncation edge
    assert np.allclose(propagator(0.6, 0.0, n_max=64).entries[:32, :32], np.eye(32), atol=1e-14)


def test_half_period_linear_amplitude():
    z = 0.4
    psi = propagator(z, np.pi, n_max=64) @ number_state(0, 64)
    assert psi[0] == pytest.approx(np.exp(-z ** 2) * np.exp(z ** 2 * np.exp(-1j * np.pi)), abs=1e-14)


def test_propagator_against_matrix_exponential():
    # independent route on a larger basis, compared on the low block
    n, z, t, kappa = 80, 0.5, 1.3, 0.2
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    h = (a.T + z * np.eye(n)) @ (a + z * np.eye(n))
    ref = expm(-1j * t * (1 - 0.5j * kappa) * h)
    got = propagator(z, t, kappa=kappa, n_max=n).entries
    assert np.max(np.abs(got[:30, :30] - ref[:30, :30])) < 1e-12


def test_zero_displacement_response_is_one():
    model = VibronicModel.v_scheme(0.0, 0.0)
    assert brute_force_response(model, third_order_pathway(1, (1, 2)), (1, 2, 3)) == pytest.approx(1)


@given(st.floats(-1, 1), st.tuples(*[st.floats(0, 4 * np.pi)] * 3))
def test_kind_2_matches_closed_form(z, t):
    model = VibronicModel.two_level(z)
    fock = brute_force_response(model, third_order_pathway(2, (1, 1)), t)
    assert abs(fock - r_v3(2, (1, 1), model.z, t)) < 1e-10


@given(st.floats(-1, 1), st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False),
       st.tuples(*[st.floats(0, 4 * np.pi)] * 3))
def test_pure_state_convergence_32_to_64(z, a0, t):
    model = VibronicModel.two_level(z)
    p = third_order_pathway(5, (1, 1))
    for init in ("vacuum", ("coherent", a0)):
        a = brute_force_response(model, p, t, init, n_max=32, check=False)
        b = brute_force_response(model, p, t, init, n_max=64)
        assert abs(a - b) < 1e-10


@pytest.mark.parametrize("n_mean, z, small", [(0.5, 1.0, 64), (1.0, 0.4, 64), (2.0, 1.0, 128)])
def test_thermal_convergence(n_mean, z, small):
    # a Boltzmann tail at <n> = 2 needs more than 64 states once |z| ~ 1
    temp = temperature_for_occupation(n_mean)
    model = VibronicModel.two_level(z)
    p = third_order_pathway(1, (1, 1))
    t = (1.2, 3.4, 0.8)
    a = brute_force_response(model, p, t, ("thermal", temp), n_max=small)
    b = brute_force_response(model, p, t, ("thermal", temp), n_max=2 * small)
    assert abs(a - b) < 1e-10


def test_thermal_mixture_too_small_basis_is_flagged():
    temp = temperature_for_occupation(2.0)
    with pytest.raises(TruncationError):
        brute_force_response(VibronicModel.two_level(0.5), third_order_pathway(2, (1, 1)), (1, 1, 1),
                             ("thermal", temp), n_max=32)


def test_leak_into_top_of_basis_is_flagged():
    with pytest.raises(TruncationError):
        brute_force_response(VibronicModel.two_level(2.5), third_order_pathway(2, (1, 1)), (1, 1, 1), n_max=16)


@given(st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False))
def test_unitarity_lower_half(z):
    assert unitarity_defect(z, 64, block=0.5) < 1e-12


def test_unitarity_three_quarter_block_needs_larger_basis():
    assert unitarity_defect(1.0, 256, block=0.75) < 1e-12
    assert unitarity_defect(1j, 256, block=0.75) < 1e-12


def test_displacement_composition_and_coherent_vector():
    a, b = 0.3 + 0.2j, -0.1 + 0.4j
    d = displacement(a, 64) @ displacement(b, 64)
    phase = np.exp(1j * np.imag(a * np.conj(b)))
    ref = displacement(a + b, 64).entries * phase
    assert np.max(np.abs(d.entries[:32, :32] - ref[:32, :32])) < 1e-12
    v = coherent_vector(a, 64)
    n = np.arange(10)
    from scipy.special import factorial
    expected = np.exp(-abs(a) ** 2 / 2) * a ** n / np.sqrt(factorial(n))
    assert np.allclose(v[:10], expected, atol=1e-15)


def test_thermal_weights():
    w = thermal_weights(0.0, 1.0, 10)
    assert w[0] == 1 and w.sum() == 1
    w = thermal_weights(temperature_for_occupation(1.0), 1.0, 200)
    assert w.sum() == pytest.approx(1, abs=1e-13)
    assert np.dot(np.arange(200), w) == pytest.approx(1.0, abs=1e-10)


def test_hermitian_generator_without_decay():
    u = propagator(0.7, 2.1, n_max=96).entries[:, :40]
    assert np.max(np.abs(u.conj().T @ u - np.eye(40))) < 1e-12
