import pytest

from qtwistor.coeff import Params
from qtwistor.harmonic import (ModuliContext, bianchi_check, build_thooft, curvature, independent_b_components,
                               verify_centrality, verify_gradient_identity, verify_harmonic, verify_moduli_structure,
                               verify_thooft_gauge_algebra, verify_y_b_relation)


@pytest.fixture(scope="module")
def mc():
    return ModuliContext(1, Params.symbolic(), degree_cap=10)


def failing(checks):
    return [c.check_id for c in checks if not c.passed]


def test_structure(mc):
    assert failing(verify_moduli_structure(mc)) == []
    assert independent_b_components(mc) == (6, 5)


def test_centrality_and_exchange(mc):
    assert failing(verify_centrality(mc)) == []
    assert failing(verify_y_b_relation(mc)) == []


def test_y_left_form_is_reported_not_zero(mc):
    c = {c.check_id: c for c in verify_y_b_relation(mc)}["eq4.10/y-left-form"]
    assert c.status == "reported"


def test_gradient_and_laplacian(mc):
    assert failing(verify_gradient_identity(mc)) == []
    assert failing(verify_harmonic(mc)) == []


def test_isotropy_is_implied_by_exchange_relations_for_generic_q():
    loose = ModuliContext(1, Params.symbolic(), isotropy=False)
    assert independent_b_components(loose) == (6, 6)
    assert loose.ctx.pbw_dimension({"b1": 2}) == 20
    assert failing(verify_gradient_identity(loose)) == []


def test_dropping_isotropy_at_q_one_breaks_gradient_and_laplacian():
    strict = ModuliContext(1, Params.numeric(1))
    loose = ModuliContext(1, Params.numeric(1), isotropy=False)
    assert loose.ctx.pbw_dimension({"b1": 2}) == 21
    assert failing(verify_gradient_identity(strict)) == [] and failing(verify_harmonic(strict)) == []
    assert len(failing(verify_gradient_identity(loose))) == 12
    assert len(failing(verify_harmonic(loose))) == 24


def test_positive_instanton_number_required():
    with pytest.raises(ValueError):
        ModuliContext(0)


@pytest.fixture(scope="module")
def sol(mc):
    return build_thooft(1, mc=mc)


def test_thooft_gauge_algebra_and_bianchi(sol):
    assert failing(verify_thooft_gauge_algebra(sol)) == []
    assert failing(bianchi_check(sol)) == []


def test_positive_prefactor_gives_flat_connection(mc):
    flat = build_thooft(1, mc=mc, prefactor_power=3)
    F, _, _ = curvature(flat)
    assert all(mc.cleared_residual_terms(x) == 0 for row in F for x in row)
    assert any(len(x) for row in flat.A for x in row)
