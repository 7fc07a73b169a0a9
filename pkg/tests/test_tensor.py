from itertools import permutations

import pytest
import sympy as sp

from qtwistor.coeff import Params, Scalar, parse_scalar
from qtwistor.tensor import (DimensionMismatch, HeckeViolated, Tensor, build_epsilon_q,
                             build_glq_rmatrix, build_slq2_rmatrix, compose, dump_tensor, epsilon_lower,
                             epsilon_r_identity_residual, epsilon_upper, hecke_residual, identity, inverse_hecke,
                             load_tensor, projectors, yang_baxter_residual)

SYM_R = Params.symbolic(symbolic_r=True)
SYM = Params.symbolic()


def sympy_rmatrix(N):
    """Independent construction as an N^2 x N^2 sympy matrix, row (a,b), column (c,d)."""
    qq = sp.Symbol("q")
    M = sp.zeros(N * N, N * N)
    for a in range(N):
        for b in range(N):
            row = a * N + b
            if a == b:
                M[row, row] = qq
            else:
                M[row, b * N + a] = 1
                if a < b:
                    M[row, row] = qq - 1 / qq
    return qq, M


def as_sympy(x, qq):
    return sp.sympify(str(x).replace("^", "**").replace("s", "sqrt(q)")).subs(sp.Symbol("q"), qq)


@pytest.mark.parametrize("N", [2, 3])
def test_rmatrix_matches_sympy_oracle_and_ybe(N):
    qq, M = sympy_rmatrix(N)
    R = build_glq_rmatrix(N, 1, SYM)
    for a in range(N):
        for b in range(N):
            for c in range(N):
                for d in range(N):
                    ours = R[(a + 1, b + 1, c + 1, d + 1)]
                    assert sp.simplify(as_sympy(ours, qq) - M[a * N + b, c * N + d]) == 0
    I = sp.eye(N)
    R12, R23 = sp.kronecker_product(M, I), sp.kronecker_product(I, M)
    assert sp.simplify(R12 * R23 * R12 - R23 * R12 * R23) == sp.zeros(N ** 3, N ** 3)
    assert sp.simplify(M * M - sp.eye(N * N) - (qq - 1 / qq) * M) == sp.zeros(N * N, N * N)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_ybe_and_hecke_with_multiparameters(N):
    R = build_glq_rmatrix(N, 1, SYM_R)
    assert yang_baxter_residual(R, SYM_R).is_zero()
    assert hecke_residual(R, SYM_R).is_zero()
    Rinv = build_glq_rmatrix(N, -1, SYM_R)
    assert compose(R, Rinv) == identity([N, N], SYM_R)
    assert inverse_hecke(R, SYM_R) == Rinv


@pytest.mark.parametrize("N", [2, 3, 4])
def test_unitary_at_q_one(N):
    p = Params.numeric(1)
    R = build_glq_rmatrix(N, 1, p)
    assert compose(R, R) == identity([N, N], p)


@pytest.mark.parametrize("N,tp,tm", [(4, 10, 6), (2, 3, 1), (3, 6, 3)])
def test_projector_traces(N, tp, tm):
    R = build_glq_rmatrix(N, 1, SYM)
    Pp, Pm = projectors(R, SYM)
    assert compose(Pp, Pp) == Pp
    assert compose(Pm, Pm) == Pm
    assert compose(Pp, Pm).is_zero()
    assert Pp + Pm == identity([N, N], SYM)
    assert Pp.full_trace_pairs() == Scalar(tp)
    assert Pm.full_trace_pairs() == Scalar(tm)


def test_slq2_equals_glq2_and_projectors():
    assert build_slq2_rmatrix(SYM) == build_glq_rmatrix(2, 1, SYM)
    Pp, Pm = projectors(build_slq2_rmatrix(SYM), SYM)
    assert Pm.full_trace_pairs() == Scalar(1)
    # P- is the rank one projector onto the q-epsilon line
    eu, el = epsilon_upper(SYM), epsilon_lower(SYM)
    total = sum((eu[(a, b)] * el[(a, b)] for a in (1, 2) for b in (1, 2)), Scalar(0))
    assert total == -(SYM.q + SYM.q_power(-1))


def test_projectors_reject_non_hecke():
    R = build_glq_rmatrix(2, 1, SYM)
    bad = Tensor(R.dims, dict(R.entries))
    bad.entries[(1, 1, 1, 1)] = bad.entries[(1, 1, 1, 1)] + 1
    with pytest.raises(HeckeViolated):
        projectors(bad, SYM)


def test_shape_errors():
    with pytest.raises(DimensionMismatch):
        yang_baxter_residual(Tensor([2, 2], {}), SYM)
    with pytest.raises(ValueError):
        build_glq_rmatrix(0)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_epsilon_q_support_and_values(N):
    eps = build_epsilon_q(N, SYM_R)
    assert set(eps.entries) == set(permutations(range(1, N + 1)))
    # a single transposition of the identity word costs -q^{-1} r(12)
    if N >= 2:
        w = (2, 1) + tuple(range(3, N + 1))
        assert eps[w] == -SYM_R.q_power(-1) * SYM_R.r(1, 2)


def test_epsilon_r_identity_standard():
    eps = build_epsilon_q(4, SYM)
    assert epsilon_r_identity_residual(eps, build_glq_rmatrix(4, 1, SYM), SYM).is_zero()


def test_epsilon_r_identity_multiparameter_is_nonzero():
    p = Params(None, True)
    eps = build_epsilon_q(4, p)
    assert not epsilon_r_identity_residual(eps, build_glq_rmatrix(4, 1, p), p).is_zero()


def test_dump_roundtrip(tmp_path):
    R = build_glq_rmatrix(4, 1, SYM_R)
    data, manifest = dump_tensor(R, tmp_path, "r4", SYM_R)
    assert load_tensor(manifest) == R
    first = data.read_bytes()
    dump_tensor(R, tmp_path, "r4", SYM_R)
    assert data.read_bytes() == first
    for line in data.read_text().splitlines():
        idx, val = line.split("->")
        assert parse_scalar(val.strip()) == R[tuple(int(x) for x in idx.split(","))]


def test_glq4_nonzero_count():
    assert build_glq_rmatrix(4, 1, SYM).nnz() == 4 + 6 + 12
    assert build_epsilon_q(4, SYM).nnz() == 24
