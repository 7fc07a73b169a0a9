"""Named verification suites.

A suite is an ordered list of tasks; each task builds what it needs and
returns a list of ``Check`` objects.  Tasks are addressed by plain data
(suite name, task key, parameter sample, sizes) so that they can run in a
worker process and be reassembled in a fixed order.
"""
from __future__ import annotations

import time
import traceback
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

from .coeff import Params
from .tensor import (build_adhm_rmatrix, build_epsilon_q, build_glq_rmatrix, build_slq2_rmatrix, compose,
                     contract, epsilon_lower, epsilon_q_rule_residual, epsilon_r_identity_residual,
                     epsilon_upper, euclidean_residuals, hecke_residual, identity, projectors,
                     pseudo_euclidean_residuals, yang_baxter_residual)
from .twistor import Check

SUITES = ("rmatrix", "reality", "twistor", "harmonic", "thooft", "adhm")

# rational s-values for sampled runs; all exceed 1, so no denominator of the
# engine (powers of s, 1 + q^2, q + 1/q) vanishes
DEFAULT_SAMPLES = (Fraction(3, 2), Fraction(5, 3), Fraction(7, 4), Fraction(9, 5), Fraction(11, 6))

# multiparameter values used by checks with free r(a,b) when a sample gives none
DEFAULT_R = (((1, 2), Fraction(2)), ((1, 3), Fraction(-3, 5)), ((2, 4), Fraction(7, 3)))


@dataclass(frozen=True)
class Sample:
    """A parameter point: None for symbolic q, otherwise s and optional r(a,b) values."""

    s: Optional[Fraction] = None
    r: Tuple[Tuple[Tuple[int, int], Fraction], ...] = ()

    @property
    def symbolic(self) -> bool:
        return self.s is None

    def params(self, symbolic_r: bool = False) -> Params:
        """Symbolic or sampled parameters; ``symbolic_r`` asks for generic r(a,b)."""
        if self.s is None:
            return Params.symbolic(symbolic_r)
        return Params.numeric(self.s, dict(self.r or (DEFAULT_R if symbolic_r else ())))

    def label(self) -> str:
        if self.s is None:
            return ""
        out = "@s=%s" % self.s
        for (a, b), v in self.r:
            out += ",r%d%d=%s" % (a, b, v)
        return out


@dataclass(frozen=True)
class Task:
    suite: str
    key: str
    sample: Sample
    N: int = 2
    P: int = 1
    degree_cap: int = 12


@dataclass
class TaskResult:
    task: Task
    checks: List[Check]
    elapsed: float


def _nnz(t) -> int:
    return t.nnz()


# ----------------------------------------------------------------------
# rmatrix suite: R-matrices, projectors, the deformed epsilon symbol


def _rmatrix_ybe(task: Task) -> List[Check]:
    params = task.sample.params(symbolic_r=True)
    out = []
    for N in (2, 3, 4):
        R = build_glq_rmatrix(N, 1, params)
        out.append(Check("eq2.1/ybe-N%d" % N, _nnz(yang_baxter_residual(R, params))))
        out.append(Check("eq2.2/hecke-N%d" % N, _nnz(hecke_residual(R, params))))
        Ri = build_glq_rmatrix(N, -1, params)
        out.append(Check("eq2.3/inverse-N%d" % N, _nnz(compose(R, Ri) - identity([N, N], params))))
    return out


def _rmatrix_unitary(task: Task) -> List[Check]:
    params = Params.numeric(1)
    out = []
    for N in (2, 3, 4):
        R = build_glq_rmatrix(N, 1, params)
        out.append(Check("eq2.4/unitary-N%d" % N, _nnz(compose(R, R) - identity([N, N], params)),
                         "q = 1, r = 1"))
    return out


def _rmatrix_slq2(task: Task) -> List[Check]:
    params = task.sample.params()
    R2 = build_slq2_rmatrix(params)
    out = [Check("eq2.5/slq2-equals-glq2", _nnz(R2 - build_glq_rmatrix(2, 1, params)), "at r(1,2) = 1")]
    eu, el = epsilon_upper(params), epsilon_lower(params)
    ee = contract(eu, el, [(1, 0)])
    out.append(Check("eq2.6/eps-contraction", _nnz(ee - identity([2], params)),
                     "eps^{al be} eps_{be ga} = +delta^al_ga"))
    out.append(Check("eq2.2/hecke-slq2", _nnz(hecke_residual(R2, params))))
    return out


def _rmatrix_projectors(task: Task) -> List[Check]:
    params = task.sample.params()
    out = []
    expected = {(2, "plus"): 3, (2, "minus"): 1, (4, "plus"): 10, (4, "minus"): 6}
    for N in (2, 4):
        R = build_glq_rmatrix(N, 1, params)
        Pp, Pm = projectors(R, params)
        I = identity([N, N], params)
        out.append(Check("eq2.11/idempotent-plus-N%d" % N, _nnz(compose(Pp, Pp) - Pp)))
        out.append(Check("eq2.11/idempotent-minus-N%d" % N, _nnz(compose(Pm, Pm) - Pm)))
        out.append(Check("eq2.11/orthogonal-N%d" % N, _nnz(compose(Pp, Pm)) + _nnz(compose(Pm, Pp))))
        out.append(Check("eq2.11/complete-N%d" % N, _nnz(Pp + Pm - I)))
        out.append(Check("eq2.11/decomposition-N%d" % N,
                         _nnz(R - Pp.scale(params.q) + Pm.scale(params.q_power(-1))),
                         "R = q P+ - q^-1 P-"))
        for name, P in (("plus", Pp), ("minus", Pm)):
            tr = sum((v for (a, b, c, d), v in P.entries.items() if (a, b) == (c, d)), params.zero)
            want = expected[(N, name)]
            out.append(Check("eq2.11/trace-%s-N%d" % (name, N), 0 if tr == params.const(want) else 1,
                             "trace %s (expected %d)" % (tr, want)))
    return out


def _rmatrix_epsilon(task: Task) -> List[Check]:
    params = task.sample.params(symbolic_r=True)
    eps = build_epsilon_q(4, params)
    out = [Check("eq2.15/well-defined", abs(len(eps.entries) - 24),
                 "%d entries, consistent along every reduced word" % len(eps.entries))]
    R = build_glq_rmatrix(4, 1, params)
    res = epsilon_q_rule_residual(eps, R, params)
    out.append(Check("eq2.15/neighbour-forms", sum(_nnz(t) for t in res.values()),
                     "-q R eps and P- eps at every neighbouring slot pair"))
    std = task.sample.params(symbolic_r=False)
    eps1, R1 = build_epsilon_q(4, std), build_glq_rmatrix(4, 1, std)
    out.append(Check("eq4.8/r-identity", _nnz(epsilon_r_identity_residual(eps1, R1, std)), "r(a,b) = 1"))
    out.append(Check("eq4.8/r-identity-multiparameter", _nnz(epsilon_r_identity_residual(eps, R, params)),
                     "with free r(a,b) the identity acquires r-dependent terms", expect_zero=False))
    return out


def _rmatrix_big(task: Task) -> List[Check]:
    params = task.sample.params()
    out = []
    for p in (1, 2):
        Rt = build_adhm_rmatrix(task.N, p, params)
        out.append(Check("eq5.21/ybe-N%dp%d" % (task.N, p), _nnz(yang_baxter_residual(Rt, params)),
                         "block R-matrix with the gauge block R_N"))
        out.append(Check("eq5.21/hecke-N%dp%d" % (task.N, p), _nnz(hecke_residual(Rt, params)),
                         "block R-matrix with the gauge block R_N"))
    return out


# ----------------------------------------------------------------------
# reality suite


def _reality(task: Task) -> List[Check]:
    # the involution is formal (s -> 1/s, r -> 1/r), so these run symbolically in every mode
    params = Params.symbolic(symbolic_r=True)
    R4, R2 = build_glq_rmatrix(4, 1, params), build_slq2_rmatrix(params)
    out = []
    for key, t in pseudo_euclidean_residuals(R4, R2, params).items():
        out.append(Check("%s/conjugate-inverse" % key, _nnz(t), "bar R = R^-1 with both index pairs reversed"))
    p1 = Params.symbolic()
    for key, t in euclidean_residuals(build_glq_rmatrix(4, 1, p1), p1).items():
        tag, _, rest = key.partition("/")
        out.append(Check("%s/%s" % (tag, rest or "residual"), _nnz(t)))
    return out


# ----------------------------------------------------------------------
# twistor suite


@lru_cache(maxsize=8)
def _twistor_context(sample: Sample, degree_cap: int):
    from .twistor import TwistorContext
    return TwistorContext(sample.params(), degree_cap=degree_cap)


def _twistor_pbw(task: Task) -> List[Check]:
    tw = _twistor_context(task.sample, task.degree_cap)
    out = []
    for md, classical in (({"z": 2}, 36), ({"z": 3}, 120), ({"dz": 2}, 28), ({"z": 1, "dz": 1}, 64)):
        dim = tw.ctx.pbw_dimension(md)
        name = "-".join("%s%d" % kv for kv in sorted(md.items()))
        out.append(Check("twistor/pbw-%s" % name, abs(dim - classical), "dimension %d (classical %d)" % (dim, classical)))
    out.append(Check("twistor/overlaps", len(tw.ctx.overlap_failures(limit=3))))
    return out


def _twistor_simple(fn_name: str) -> Callable[[Task], List[Check]]:
    def run(task: Task) -> List[Check]:
        from . import twistor
        return getattr(twistor, fn_name)(_twistor_context(task.sample, task.degree_cap))
    return run


# ----------------------------------------------------------------------
# harmonic suite


@lru_cache(maxsize=8)
def _moduli_context(sample: Sample, P: int, degree_cap: int):
    from .harmonic import ModuliContext
    return ModuliContext(P, sample.params(), degree_cap=degree_cap)


def _harmonic(fn_name: str, with_p: bool = False) -> Callable[[Task], List[Check]]:
    def run(task: Task) -> List[Check]:
        from . import harmonic
        mc = _moduli_context(task.sample, task.P, task.degree_cap)
        fn = getattr(harmonic, fn_name)
        return fn(mc, 1) if with_p else fn(mc)
    return run


# ----------------------------------------------------------------------
# thooft suite


@lru_cache(maxsize=4)
def _thooft_solution(sample: Sample, P: int, degree_cap: int):
    from .harmonic import build_thooft
    return build_thooft(P, sample.params(), degree_cap=degree_cap)


def _thooft(fn_name: str) -> Callable[[Task], List[Check]]:
    def run(task: Task) -> List[Check]:
        from . import harmonic
        sol = _thooft_solution(task.sample, task.P, task.degree_cap)
        return getattr(harmonic, fn_name)(sol)
    return run


# ----------------------------------------------------------------------
# adhm suite


def _adhm_gauge(task: Task) -> List[Check]:
    from .adhm import build_gauge_algebra, verify_adhm_gauge_algebra, verify_gauge_algebra_confluence
    ga = build_gauge_algebra(task.N, task.P, task.sample.params())
    return verify_adhm_gauge_algebra(task.N, task.P, ga.params, ga) + verify_gauge_algebra_confluence(ga)


def _adhm_chain(task: Task) -> List[Check]:
    from .adhm import verify_curvature_chain
    return verify_curvature_chain()


@lru_cache(maxsize=4)
def _adhm_moduli(sample: Sample, N: int, P: int, degree_cap: int):
    from .adhm import AdhmModuli, ConstraintIdeal
    am = AdhmModuli(N, P, sample.params(), degree_cap=degree_cap)
    return am, ConstraintIdeal(am)


def _adhm(fn_name: str, with_ideal: bool = False) -> Callable[[Task], List[Check]]:
    def run(task: Task) -> List[Check]:
        from . import adhm
        am, ideal = _adhm_moduli(task.sample, task.N, task.P, task.degree_cap)
        fn = getattr(adhm, fn_name)
        return fn(am, ideal) if with_ideal else fn(am)
    return run


# ----------------------------------------------------------------------
# registry

REGISTRY: Dict[str, List[Tuple[str, Callable[[Task], List[Check]]]]] = {
    "rmatrix": [
        ("ybe-hecke", _rmatrix_ybe),
        ("unitary", _rmatrix_unitary),
        ("slq2", _rmatrix_slq2),
        ("projectors", _rmatrix_projectors),
        ("epsilon", _rmatrix_epsilon),
    ],
    "reality": [("reality", _reality)],
    "twistor": [
        ("pbw", _twistor_pbw),
        ("dz-symmetry", _twistor_simple("verify_dz_symmetry")),
        ("cubic", _twistor_simple("verify_cubic_identity")),
        ("y", _twistor_simple("verify_y_relations")),
        ("derivatives", _twistor_simple("check_derivative_algebra")),
    ],
    "harmonic": [
        ("structure", _harmonic("verify_moduli_structure")),
        ("y-b", _harmonic("verify_y_b_relation")),
        ("centrality", _harmonic("verify_centrality")),
        ("y-derivatives", _harmonic("verify_y_derivatives")),
        ("gradient", _harmonic("verify_gradient_identity", True)),
        ("laplacian", _harmonic("verify_harmonic", True)),
    ],
    "thooft": [
        ("self-dual", _thooft("verify_thooft_selfdual")),
        ("gauge-algebra", _thooft("verify_thooft_gauge_algebra")),
        ("trace", _thooft("verify_trace_conditions")),
        ("bianchi", _thooft("bianchi_check")),
    ],
    "adhm": [
        ("block-rmatrix", _rmatrix_big),
        ("gauge-algebra", _adhm_gauge),
        ("curvature-chain", _adhm_chain),
        ("moduli-structure", _adhm("verify_adhm_moduli_structure")),
        ("g-centrality", _adhm("verify_g_centrality", True)),
        ("constraint", _adhm("verify_constraint_equivalence", True)),
        ("self-dual", _adhm("verify_adhm_selfduality")),
        ("big-matrix", _adhm("verify_big_matrix_relations")),
    ],
}

# tasks whose result does not depend on the parameter point
SAMPLE_FREE = {("rmatrix", "unitary"), ("reality", "reality"), ("adhm", "curvature-chain")}

# t'Hooft checks stated for a single instanton only
SINGLE_INSTANTON = {("thooft", "gauge-algebra"), ("thooft", "bianchi")}


def tasks_for(suite: str, sample: Sample, N: int = 2, P: int = 1, degree_cap: int = 12) -> List[Task]:
    if suite not in REGISTRY:
        raise KeyError("unknown suite %r" % suite)
    return [Task(suite, key, sample, N, P, degree_cap) for key, _ in REGISTRY[suite]
            if P == 1 or (suite, key) not in SINGLE_INSTANTON]


def run_task(task: Task) -> TaskResult:
    """Run one task; an engine error becomes a single failing check instead of propagating."""
    fn = dict(REGISTRY[task.suite])[task.key]
    t0 = time.perf_counter()
    try:
        checks = fn(task)
    except Exception as exc:  # noqa: BLE001 - every engine error is reported per task
        last = traceback.extract_tb(exc.__traceback__)[-1]
        checks = [Check("%s/%s/error" % (task.suite, task.key), 1,
                        "%s: %s (at %s:%d)" % (type(exc).__name__, exc, last.name, last.lineno))]
    label = task.sample.label()
    if label and (task.suite, task.key) not in SAMPLE_FREE:
        checks = [Check(c.check_id + label, c.residual_terms, c.notes, c.expect_zero) for c in checks]
    return TaskResult(task, checks, time.perf_counter() - t0)
