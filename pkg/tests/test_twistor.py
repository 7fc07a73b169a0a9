import pytest

from qtwistor.coeff import Params
from qtwistor.twistor import (Check, FormDegreeMismatch, TwistorContext, check_derivative_algebra,
                              verify_cubic_identity, verify_dz_symmetry, verify_y_relations)


@pytest.fixture(scope="module")
def tw():
    return TwistorContext(Params.symbolic(), degree_cap=8)


def all_pass(checks):
    return [c.check_id for c in checks if not c.passed]


@pytest.mark.parametrize("md,classical", [({"z": 2}, 36), ({"dz": 2}, 28), ({"z": 1, "dz": 1}, 64),
                                          ({"z": 1}, 8), ({"dz": 1}, 8)])
def test_pbw_dimensions(tw, md, classical):
    assert tw.ctx.pbw_dimension(md) == classical
    assert tw.ctx.normal_word_count(md) == classical


def test_rewriting_system_is_confluent(tw):
    assert tw.ctx.overlap_failures() == []


def test_relation_checks(tw):
    assert all_pass(verify_dz_symmetry(tw)) == []
    assert all_pass(verify_cubic_identity(tw)) == []
    assert all_pass(verify_y_relations(tw)) == []


def test_cubic_identity_has_32_components(tw):
    ids = [c.check_id for c in verify_cubic_identity(tw) if c.check_id.startswith("eq2.16/component")]
    assert len(ids) == 32


def test_derivative_algebra(tw):
    assert all_pass(check_derivative_algebra(tw)) == []


def test_d_is_nilpotent_on_products(tw):
    p = tw.z(1, 2) * tw.z(2, 3) * tw.z(1, 4)
    assert tw.ctx.is_zero(tw.exterior_derivative(tw.exterior_derivative(p)))


def test_y_is_not_zero(tw):
    assert not tw.ctx.is_zero(tw.y(1, 2))


def test_dual_requires_two_form(tw):
    with pytest.raises(FormDegreeMismatch):
        tw.dual_2form(tw.dz(1, 1))


def test_numeric_context_matches_symbolic_dimension():
    num = TwistorContext(Params.numeric(3), degree_cap=6)
    assert num.ctx.pbw_dimension({"z": 2}) == 36


def test_check_status():
    assert Check("x/a", 0).status == "pass"
    assert Check("x/a", 3).status == "fail"
    assert Check("x/a", 3, expect_zero=False).status == "reported"
    assert Check("x/a", 0, expect_zero=False).status == "fail"
    assert Check("eq2.1/ybe-N2", 0).tag == "eq2.1"
