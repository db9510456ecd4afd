import numpy as np
import pytest
from hypothesis import given, strategies as st

from vibronic_response.model import (
    BRA,
    KET,
    Interaction,
    KINDS_WITH_DOUBLES,
    THIRD_ORDER_KINDS,
    ManifoldRequiredError,
    Mode,
    ModelError,
    Pathway,
    PathwayError,
    VibronicModel,
    electronic_constant,
    electronic_phase,
    electronic_prefactor,
    enumerate_third_order,
    generic_electronic_constant,
    third_order_pathway,
)


def xi_model(z1=0.4, z2=-0.7):
    return VibronicModel.single_mode([0, 1.0, 2.5], [0, z1, z2], manifolds=("ground", "single", "double"))


def test_rejects_nonzero_ground_energy_and_displacement():
    with pytest.raises(ModelError):
        VibronicModel.single_mode([0.1, 1.0], [0, 0.3])
    with pytest.raises(ModelError):
        Mode(1.0, (0.2, 0.3))
    with pytest.raises(ModelError):
        Mode(0.0, (0.0, 0.3))
    with pytest.raises(ModelError):
        VibronicModel.single_mode([0, 1.0], [0, 0.3], kappa=-1)


def test_manifold_tags_validated():
    with pytest.raises(ModelError):
        VibronicModel.single_mode([0, 1], [0, 0.1], manifolds=("single", "single"))
    with pytest.raises(ModelError):
        VibronicModel.single_mode([0, 1], [0, 0.1], manifolds=("ground", "triple"))


def test_two_level_kind_2_single_pathway():
    out = enumerate_third_order(VibronicModel.two_level(0.4), 2)
    assert [lv for lv, _ in out] == [(1, 1)]


def test_v_scheme_kind_1_four_pathways():
    out = enumerate_third_order(VibronicModel.v_scheme(0.4, -0.7), 1)
    assert sorted(lv for lv, _ in out) == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_xi_scheme_kind_3_one_pathway():
    out = enumerate_third_order(xi_model(), 3)
    assert [lv for lv, _ in out] == [(1, 1, 2)]


@pytest.mark.parametrize("kind", KINDS_WITH_DOUBLES)
def test_doubles_need_manifold(kind):
    with pytest.raises(ManifoldRequiredError):
        enumerate_third_order(VibronicModel.v_scheme(0.1, 0.2), kind)


@given(st.integers(1, 3), st.integers(0, 2))
def test_pathway_count(n_single, n_double):
    n = 1 + n_single + n_double
    tags = ("ground",) + ("single",) * n_single + ("double",) * n_double
    model = VibronicModel.single_mode([0.0] * n, [0.0] * n, manifolds=tags)
    for kind in THIRD_ORDER_KINDS:
        if kind in KINDS_WITH_DOUBLES and n_double == 0:
            continue
        expected = n_single ** 2 * (n_double if kind in KINDS_WITH_DOUBLES else 1)
        assert len(enumerate_third_order(model, kind)) == expected


def test_kind_2_prefactor_at_zero_time_is_constant():
    model = VibronicModel.v_scheme(0.4, -0.7, eps=(3.0, 3.3), dipoles=[[0, 1, 0.5], [1, 0, 0], [0.5, 0, 0]])
    c = electronic_constant(model, 2, (1, 2))
    assert c == pytest.approx((1j) ** 3 * 0.25)
    assert electronic_prefactor(model, 2, (1, 2), (0, 1.7, 0)) == pytest.approx(c)


def test_kind_5_and_kind_8_phases():
    model = xi_model()
    t = (0.3, 1.1, 0.8)
    c5 = electronic_constant(model, 5, (1, 1))
    assert electronic_prefactor(model, 5, (1, 1), t) == pytest.approx(c5 * np.exp(-1j * (1.0 * 0.3 + 1.0 * 0.8)))
    c8 = electronic_constant(model, 8, (1, 1, 2))
    expected = c8 * np.exp(-1j * (1.0 * 0.3 + 2.5 * 1.1 + 1.0 * 0.8))
    assert electronic_prefactor(model, 8, (1, 1, 2), t) == pytest.approx(expected)


def test_kind_4_uses_corrected_phase():
    model = VibronicModel.v_scheme(0, 0, eps=(2.0, 3.0))
    t1, t2, t3 = 0.2, 0.5, 0.9
    assert electronic_phase(model, 4, (1, 2), (t1, t2, t3)) == pytest.approx(3.0 * t2 - 2.0 * (t1 + t2 + t3))


def test_kind_7_constant_as_tabulated():
    model = xi_model()
    assert electronic_constant(model, 7, (1, 1, 2)) == electronic_constant(model, 6, (1, 1, 2))


@given(st.sampled_from(THIRD_ORDER_KINDS), st.tuples(*[st.floats(0, 20)] * 3))
def test_prefactor_modulus_is_time_independent(kind, times):
    model = xi_model()
    levels = (1, 1, 2) if kind in KINDS_WITH_DOUBLES else (1, 1)
    c = electronic_constant(model, kind, levels)
    assert abs(electronic_prefactor(model, kind, levels, times)) == pytest.approx(abs(c))


@pytest.mark.parametrize("kind", (1, 2, 4, 5))
def test_generic_constant_matches_table_for_unit_dipoles(kind):
    model = VibronicModel.v_scheme(0.1, 0.2)
    assert generic_electronic_constant(model, third_order_pathway(kind, (1, 2))) == pytest.approx(
        electronic_constant(model, kind, (1, 2)))


def test_pathway_invariants():
    with pytest.raises(PathwayError):
        Pathway((Interaction(KET, 1, 0),))
    with pytest.raises(PathwayError):
        Pathway((Interaction(KET, 0, 1), Interaction(KET, 0, 2)))
    with pytest.raises(PathwayError):
        Pathway((Interaction(BRA, 0, 0),))
    p = third_order_pathway(1, (1, 2))
    assert p.sequences() == ((0, 2, 2), (1, 1, 0))
    assert p.detection == (2, 0)
    assert (p.n_bra, p.n_ket) == (2, 1)
