import pytest

from qtwistor.adhm import (AdhmModuli, ConstraintIdeal, build_gauge_algebra, exchange_weight, g_normalization,
                           verify_adhm_gauge_algebra, verify_curvature_chain, verify_gauge_algebra_confluence)
from qtwistor.coeff import Params, parse_scalar


def failing(checks):
    return [c.check_id for c in checks if not c.passed]


def test_curvature_chain():
    assert failing(verify_curvature_chain()) == []


def test_gauge_algebra_n2_p1():
    ga = build_gauge_algebra(2, 1, Params.symbolic())
    assert failing(verify_adhm_gauge_algebra(2, 1, ga.params, ga)) == []
    assert failing(verify_gauge_algebra_confluence(ga)) == []


@pytest.fixture(scope="module")
def free_and_ideal():
    am = AdhmModuli(2, 1, Params.symbolic())
    return am, ConstraintIdeal(am)


def test_ideal_requires_unconstrained_algebra():
    with pytest.raises(ValueError):
        ConstraintIdeal(AdhmModuli(2, 1, Params.symbolic(), constraint=True))


def test_constraint_generators_lie_in_ideal(free_and_ideal):
    am, ideal = free_and_ideal
    assert len(ideal.cons) == 16
    for C in ideal.cons:
        assert ideal.excess(C) == 0
    z = am.ctx.gen("z", 1, 1)
    assert ideal.excess(z * ideal.cons[0]) == 0


def test_g_exchange_weight_with_z(free_and_ideal):
    am, ideal = free_and_ideal
    zs = [am.ctx.gen("z", al, a) for al in (1, 2) for a in range(1, 5)]
    assert exchange_weight(ideal, am.g_upper(1, 1), zs) == 2


def test_g_normalization_value(free_and_ideal):
    am, ideal = free_and_ideal
    lam = g_normalization(am, ideal)
    assert lam == parse_scalar("(-s^4-1)/(2*s^2)")
    assert lam == -(1 + am.params.q_power(2)) / (2 * am.params.q)


def test_rescaled_b_z_exchange_makes_g_central():
    am = AdhmModuli(2, 1, Params.symbolic(), bz_scale=-1)
    ideal = ConstraintIdeal(am)
    zs = [am.ctx.gen("z", al, a) for al in (1, 2) for a in range(1, 5)]
    assert exchange_weight(ideal, am.g_upper(1, 1), zs) == 0
    assert g_normalization(am, ideal) == parse_scalar("(-s^4-1)/(2*s^3)")
