"""Moduli b^p, the central elements X_p, q-harmonic functions and the t'Hooft ansatz.

The moduli ``b1[a,b]``, ``b2[a,b]``, ... carry the projection constraint
b = P- b, so after the linear relations only the six letters with a < b
survive.  Each X_p = eps_q^{abcd} y_ab b^p_cd is central apart from its
weight against dz; its integer powers are kept as formal tags ``X1^k``.  For
P >= 2 the potential Phi = sum_p X_p^-1 has an opaque inverse tag ``Phi``.

Identities involving tags are tested by clearing denominators.  Negative
powers of Phi are removed by multiplying with a power of Phi, written as a
sum of X_p^-1.  The terms are then split by the gradings every relation
respects (the b^p degree and the z degree, with X_p counted as y b^p); each
piece is multiplied by the smallest powers of the X_p that make all
exponents non-negative, the positive powers are expanded into z and b, and
the result must reduce to zero.  Multiplying by the invertible X_p and Phi
does not change whether an expression vanishes, so the test is exact.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .coeff import Params
from .ncalg import FamilySpec, NCPolynomial, TagSpec, solve_linear
from .tensor import build_glq_rmatrix
from .twistor import CONF, SPIN, Check, TwistorContext, _acc

PAIRS = [(a, b) for a in CONF for b in CONF if a < b]


def four_r_tensor(R: Dict) -> Dict[Tuple[int, int, int, int], Dict[Tuple[int, int, int, int], object]]:
    """M[(a,b,c,d)][(a',b',c',d')] = R^{ea'}_{ga} R^{fg}_{cb} R^{c'b'}_{he} R^{d'h}_{df}."""
    byl = {}
    for (u, v, w, x), val in R.items():
        byl.setdefault(x, []).append((u, v, w, val))
    out = {}
    for a, b, c, d in itertools.product(CONF, repeat=4):
        acc = {}
        for e, a1, g, v1 in byl.get(a, ()):
            for f, g2, c2, v2 in byl.get(b, ()):
                if g2 != g or c2 != c:
                    continue
                for c1, b1, h, v3 in [(u, v, w, val) for (u, v, w, x), val in R.items() if x == e]:
                    for d1, h2, d2, v4 in byl.get(f, ()):
                        if h2 != h or d2 != d:
                            continue
                        _acc(acc, (a1, b1, c1, d1), v1 * v2 * v3 * v4)
        out[(a, b, c, d)] = {k: v for k, v in acc.items() if v}
    return out


def two_r_tensor(R: Dict):
    """N[(a,b,c)][(h,e,f)] = R^{eh}_{ga} R^{fg}_{cb} (the b-z exchange)."""
    out = {}
    for a, b, c in itertools.product(CONF, repeat=3):
        acc = {}
        for (e, h, g, aa), v in R.items():
            if aa != a:
                continue
            for (f, gg, cc, bb), w in R.items():
                if gg == g and cc == c and bb == b:
                    _acc(acc, (h, e, f), v * w)
        out[(a, b, c)] = {k: v for k, v in acc.items() if v}
    return out


def kappa(e: int, w):
    """Coefficient in d(T^e) = kappa_e T^(e-1) dT for a tag with exchange weight w."""
    if e > 0:
        return sum((w ** j for j in range(e)), w * 0)
    if e < 0:
        return -sum((w ** (-j) for j in range(1, -e + 1)), w * 0)
    return w * 0


class ModuliContext:
    """Twistor calculus extended by P moduli families and central tags."""

    def __init__(self, P: int = 1, params: Optional[Params] = None, degree_cap: int = 10,
                 isotropy: bool = True, projection: bool = True, mixed_order: str = "direct",
                 mixed_scale: int = -4, R4=None):
        if P < 1:
            raise ValueError("P must be positive")
        self.P = P
        self.params = params or Params.symbolic()
        self.isotropy = isotropy
        self.projection = projection
        self.mixed_order = mixed_order
        self.mixed_scale = mixed_scale
        fams = [FamilySpec("b%d" % p, (4, 4), 0, 1 + p, ("conf", "conf")) for p in range(1, P + 1)]
        tags = [TagSpec("X%d" % p, {"dz": 4}) for p in range(1, P + 1)]
        if P > 1:
            tags.append(TagSpec("Phi", {"dz": -4}))
        self.tagspecs = {t.name: t for t in tags}
        self.tw = TwistorContext(self.params, degree_cap=degree_cap, extra_families=fams, tags=tags,
                                 extra_linear=self._linear, extra_quadratic=self._quadratic,
                                 transparent=[f.name for f in fams], tag_derivative=self._tag_derivative,
                                 R4=R4)
        self.ctx = self.tw.ctx
        self.T = self.tw.T
        self._X = {}
        self._dX = {}
        self._Xpow = {}

    # -- relations ----------------------------------------------------------
    def _linear(self, ctx, T):
        rels = []
        if not self.projection:
            return rels
        for p in range(1, self.P + 1):
            for a in CONF:
                for b in CONF:
                    terms = {(ctx.letter("b%d" % p, a, b),): ctx.params.one}
                    for (d, c, bb, aa), v in T.P4m.entries.items():
                        if bb == b and aa == a:
                            _acc(terms, (ctx.letter("b%d" % p, c, d),), -v)
                    rels.append(NCPolynomial(ctx, {(w, ()): c for w, c in terms.items()}))
        return rels

    def _quadratic(self, ctx, T):
        R = T.R4.entries
        self.M4 = four_r_tensor(R)
        self.N2 = two_r_tensor(R)
        rels = []
        qm2 = ctx.params.q_power(-2)
        for p in range(1, self.P + 1):
            bp = "b%d" % p
            # b^p_ab x^ga_c - R^{eh}_{ga} R^{fg}_{cb} x^ga_h b^p_ef  for x in (z, dz)
            for (a, b, c), coefs in self.N2.items():
                for ga in SPIN:
                    for fam in ("z", "dz"):
                        terms = {(ctx.letter(bp, a, b), ctx.letter(fam, ga, c)): ctx.params.one}
                        for (h, e, f), v in coefs.items():
                            _acc(terms, (ctx.letter(fam, ga, h), ctx.letter(bp, e, f)), -v)
                        rels.append(NCPolynomial(ctx, {(w, ()): x for w, x in terms.items()}))
            # b^p_ab b^ph_cd - q^-2 M b^ph_a'b' b^p_c'd'  (p <= ph)
            for ph in range(p, self.P + 1):
                first, second = "b%d" % p, "b%d" % ph
                scale = qm2
                if ph != p:
                    scale = ctx.params.s_power(self.mixed_scale)
                    if self.mixed_order == "swapped":
                        first, second = second, first
                for (a, b, c, d), coefs in self.M4.items():
                    terms = {(ctx.letter(first, a, b), ctx.letter(second, c, d)): ctx.params.one}
                    for (a1, b1, c1, d1), v in coefs.items():
                        _acc(terms, (ctx.letter(second, a1, b1), ctx.letter(first, c1, d1)), -scale * v)
                    rels.append(NCPolynomial(ctx, {(w, ()): x for w, x in terms.items()}))
            if self.isotropy:
                terms = {}
                for (a, b, c, d), e in T.epsq.entries.items():
                    _acc(terms, (ctx.letter(bp, a, b), ctx.letter(bp, c, d)), e)
                rels.append(NCPolynomial(ctx, {(w, ()): x for w, x in terms.items()}))
        return rels

    # -- generators -------------------------------------------------------------
    def b(self, p: int, a: int, c: int) -> NCPolynomial:
        return self.ctx.normal_form(self.ctx.gen("b%d" % p, a, c))

    def y(self, a, b) -> NCPolynomial:
        return self.tw.y(a, b)

    def X(self, p: int) -> NCPolynomial:
        """X_p = eps_q^{abcd} y_ab b^p_cd, expanded and reduced."""
        if p not in self._X:
            out = self.ctx.zero()
            for (a, b, c, d), e in self.T.epsq.entries.items():
                out = out + (self.tw.y(a, b) * self.ctx.gen("b%d" % p, c, d)).scale(e)
            self._X[p] = self.ctx.normal_form(out)
        return self._X[p]

    def Xpow(self, p: int, k: int) -> NCPolynomial:
        if k < 0:
            raise ValueError("only non-negative powers expand")
        key = (p, k)
        if key not in self._Xpow:
            self._Xpow[key] = self.ctx.one() if k == 0 else self.ctx.normal_form(self.Xpow(p, k - 1) * self.X(p))
        return self._Xpow[key]

    def dX(self, a: int, al: int, p: int) -> NCPolynomial:
        """partial^a_al X_p (a polynomial in z and b^p)."""
        key = (a, al, p)
        if key not in self._dX:
            self._dX[key] = self.tw.partial(a, al, self.X(p))
        return self._dX[key]

    def tagpoly(self, tags) -> NCPolynomial:
        return NCPolynomial(self.ctx, {((), tuple(sorted(tags))): self.params.one})

    # -- derivative of tags ----------------------------------------------------
    def _tag_weight(self, name: str, e: int):
        return self.params.s_power(self.tagspecs[name].weights["dz"] * e)

    def _single_tag_derivative(self, a, al, name, e) -> NCPolynomial:
        if name == "Phi":
            w = self.params.q_power(-1) ** 2
            dphi = self.ctx.zero()
            for p in range(1, self.P + 1):
                dphi = dphi + self._single_tag_derivative(a, al, "X%d" % p, -1)
            return (dphi * self.tagpoly([("Phi", e - 1)] if e - 1 else [])).scale(kappa(e, w))
        p = int(name[1:])
        w = self.params.q_power(2)
        t = [(name, e - 1)] if e - 1 else []
        return (self.dX(a, al, p) * self.tagpoly(t)).scale(kappa(e, w))

    def _tag_derivative(self, a, al, tags) -> NCPolynomial:
        out = self.ctx.zero()
        pref = self.params.one
        for i, (name, e) in enumerate(tags):
            others = [x for j, x in enumerate(tags) if j != i]
            out = out + (self._single_tag_derivative(a, al, name, e) * self.tagpoly(others)).scale(pref)
            pref = pref * self._tag_weight(name, e)
        return out

    # -- zero test with denominators -------------------------------------------
    def _phi_power(self, k: int) -> NCPolynomial:
        """Phi^k = (sum_p X_p^-1)^k for k >= 0, as a combination of X tags."""
        out = self.ctx.one()
        inv = self.ctx.sum(self.ctx.tag("X%d" % p, -1) for p in range(1, self.P + 1))
        for _ in range(k):
            out = out * inv
        return out

    def _grade(self, w, t):
        """Gradings kept by every relation when X_p is read as eps y b^p."""
        ctx = self.ctx
        td = dict(t)
        zdeg = sum(1 for c in w if ctx.family_of[c] == "z")
        bdeg = []
        for p in range(1, self.P + 1):
            e = td.get("X%d" % p, 0)
            zdeg += 2 * e
            bdeg.append(sum(1 for c in w if ctx.family_of[c] == "b%d" % p) + e)
        return (zdeg,) + tuple(bdeg)

    def cleared_groups(self, p: NCPolynomial) -> List[NCPolynomial]:
        """Graded pieces of ``p`` with every inverse cleared; ``p`` is zero iff all are."""
        ctx = self.ctx
        p = ctx.normal_form(p)
        phis = [dict(t).get("Phi", 0) for (_, t) in p.terms]
        if any(phis):
            shift = -min(min(phis), 0)
            acc = ctx.zero()
            for (w, t), c in p.terms.items():
                rest = tuple(x for x in t if x[0] != "Phi")
                acc = acc + NCPolynomial(ctx, {(w, rest): c}) * self._phi_power(dict(t).get("Phi", 0) + shift)
            p = ctx.normal_form(acc)
        groups: Dict = {}
        for (w, t), c in p.terms.items():
            groups.setdefault(self._grade(w, t), []).append((w, t, c))
        out = []
        for _, terms in sorted(groups.items()):
            names = sorted({n for _, t, _ in terms for n, _ in t})
            mins = {n: min(min(dict(t).get(n, 0) for _, t, _ in terms), 0) for n in names}
            acc = ctx.zero()
            for w, t, c in terms:
                td = dict(t)
                poly = NCPolynomial(ctx, {(w, ()): c})
                for n in names:
                    k = td.get(n, 0) - mins[n]
                    if k:
                        poly = poly * self.Xpow(int(n[1:]), k)
                acc = acc + poly
            out.append(ctx.normal_form(acc))
        return out

    def cleared_residual_terms(self, p: NCPolynomial) -> int:
        return sum(len(g) for g in self.cleared_groups(p))

    # -- Laplacian --------------------------------------------------------------
    def laplacian(self, b: int, a: int, f: NCPolynomial) -> NCPolynomial:
        """Delta^{ba} f = -(q/(1+q^2)) eps^{al be}(q) d^b_be d^a_al f."""
        P = self.params
        pref = -P.q / (P.one + P.q_power(2))
        out = self.ctx.zero()
        for (al, be), e in self.T.eps_up.entries.items():
            out = out + self.tw.partial(b, be, self.tw.partial(a, al, f)).scale(pref * e)
        return self.ctx.normal_form(out)


# ----------------------------------------------------------------------
# moduli checks


def independent_b_components(mc: ModuliContext) -> Tuple[int, int]:
    """(letters surviving the projection, minus one per independent quadric)."""
    ctx = mc.ctx
    survivors = [c for c in range(len(ctx.letters)) if ctx.family_of[c] == "b1" and c not in ctx.subst]
    quadric = 0
    if mc.isotropy:
        rel = ctx.quadratic_relations[-1]
        quadric = 1 if ctx._substitute_letters(rel) else 0
    return len(survivors), len(survivors) - quadric


def verify_moduli_structure(mc: ModuliContext) -> List[Check]:
    out = []
    n6, n5 = independent_b_components(mc)
    out.append(Check("eq4.9/independent-components", abs(n5 - 5),
                     "%d components after projection, %d after isotropy" % (n6, n5)))
    fails = mc.ctx.overlap_failures(limit=3)
    out.append(Check("moduli/overlaps", len(fails), "length-3 ambiguities that do not resolve"))
    ctx = mc.ctx
    for md, classical in (({"b1": 2}, 20), ({"b1": 1, "z": 1}, 48), ({"b1": 1, "dz": 1}, 48),
                          ({"b1": 2, "z": 1}, 160), ({"b1": 3}, 50)):
        dim = ctx.pbw_dimension(md)
        out.append(Check("moduli/pbw-%s" % "-".join("%s^%d" % kv for kv in sorted(md.items())),
                         abs(dim - classical), "dimension %d (classical %d)" % (dim, classical)))
    if mc.P >= 2:
        dim = ctx.pbw_dimension({"b1": 1, "b2": 1})
        out.append(Check("moduli/pbw-b1-b2", abs(dim - 36), "dimension %d (classical 36)" % dim))
    return out


def verify_y_b_relation(mc: ModuliContext) -> List[Check]:
    """The y-b exchange that follows from the b-z relation.

    Pushing b through both z of y gives b_ab y_cd = M y_a'b' b_c'd' with the
    four-R coefficient M.  The same coefficient with b and y exchanged on both
    sides does not hold; it is reported with ``expect_zero=False``.
    """
    ctx = mc.ctx
    Y = {(a, b): mc.y(a, b) for a in CONF for b in CONF}
    bp = lambda a, b: ctx.gen("b1", a, b)
    good = swapped = chained = 0
    for (a, b, c, d), coefs in mc.M4.items():
        r1 = bp(a, b) * Y[(c, d)]
        r2 = Y[(a, b)] * bp(c, d)
        for (a1, b1, c1, d1), v in coefs.items():
            r1 = r1 - (Y[(a1, b1)] * bp(c1, d1)).scale(v)
            r2 = r2 - (bp(a1, b1) * Y[(c1, d1)]).scale(v)
        good += len(ctx.normal_form(r1))
        swapped += len(ctx.normal_form(r2))
        r3 = bp(a, b) * Y[(c, d)]
        for (h, e, f), v in mc.N2[(a, b, c)].items():
            for (h2, e2, f2), w in mc.N2[(e, f, d)].items():
                r3 = r3 - (Y[(h, h2)] * bp(e2, f2)).scale(v * w)
        chained += len(ctx.normal_form(r3))
    return [Check("eq4.10/y-b-exchange", good, "b y = M y b, derived from the b-z exchange"),
            Check("eq4.10/b-z-chain", chained, "b y from two b-z exchanges"),
            Check("eq4.10/y-left-form", swapped,
                  "y b = M b y does not hold; b and y must be exchanged", expect_zero=False)]


def verify_centrality(mc: ModuliContext) -> List[Check]:
    ctx = mc.ctx
    out = []
    q2 = mc.params.q_power(2)
    for p in range(1, mc.P + 1):
        X = mc.X(p)
        tz = tdz = 0
        for al in SPIN:
            for a in CONF:
                z = ctx.gen("z", al, a)
                dz = ctx.gen("dz", al, a)
                tz += len(ctx.normal_form(X * z - z * X))
                tdz += len(ctx.normal_form(X * dz - (dz * X).scale(q2)))
        out.append(Check("eq4.12/X%d-z" % p, tz))
        out.append(Check("eq4.15/X%d-dz" % p, tdz))
        for ph in range(1, mc.P + 1):
            tb = 0
            for a, c in PAIRS:
                bb = ctx.gen("b%d" % ph, a, c)
                tb += len(ctx.normal_form(X * bb - bb * X))
            out.append(Check("eq4.12/X%d-b%d" % (p, ph), tb))
        ty = 0
        for a in CONF:
            for c in CONF:
                y = mc.y(a, c)
                ty += len(ctx.normal_form(X * y - y * X))
        out.append(Check("eq4.12/X%d-y" % p, ty))
    return out


def verify_y_derivatives(mc: ModuliContext) -> List[Check]:
    """partial y (4.1), d y (4.3) and Delta y = P- (4.7)."""
    ctx, T, tw = mc.ctx, mc.T, mc.tw
    t1 = t3 = t7 = 0
    Pm = T.P4m.entries
    for a in CONF:
        for b in CONF:
            y = mc.y(a, b)
            for c in CONF:
                for al in SPIN:
                    r = tw.partial(c, al, y)
                    for (x, be), e in T.eps_lo.entries.items():
                        if x != al:
                            continue
                        for d in CONF:
                            v = Pm.get((d, c, b, a))
                            if v:
                                r = r - ctx.gen("z", be, d).scale(e * v)
                    t1 += len(ctx.normal_form(r))
            r = tw.exterior_derivative(y)
            for (al, be), e in T.eps_lo.entries.items():
                for (d, c, bb, aa), v in Pm.items():
                    if bb == b and aa == a:
                        r = r - (ctx.gen("dz", al, c) * ctx.gen("z", be, d)).scale(e * v)
            t3 += len(ctx.normal_form(r))
            for bu in CONF:
                for au in CONF:
                    r = mc.laplacian(bu, au, y)
                    v = Pm.get((bu, au, b, a))
                    if v:
                        r = r - ctx.const(v)
                    t7 += len(r)
    return [Check("eq4.1/partial-y", t1), Check("eq4.3/dy", t3),
            Check("eq4.7/laplacian-y", t7)]


def gradient_identity_component(mc: ModuliContext, b: int, a: int, p: int = 1) -> NCPolynomial:
    ctx = mc.ctx
    r = ctx.zero()
    for (al, be), e in mc.T.eps_up.entries.items():
        r = r + (mc.dX(b, be, p) * mc.dX(a, al, p)).scale(e)
    qi = mc.params.q_power(-1)
    for (aa, bb, c, d), e in mc.T.epsq.entries.items():
        if aa == a and bb == b:
            r = r + (ctx.gen("b%d" % p, c, d) * mc.X(p)).scale(qi * e)
    return ctx.normal_form(r)


def verify_gradient_identity(mc: ModuliContext, p: int = 1) -> List[Check]:
    out = []
    for b in CONF:
        for a in CONF:
            r = gradient_identity_component(mc, b, a, p)
            out.append(Check("eq4.18/component-b%da%d" % (b, a), len(r)))
    return out


def verify_harmonic(mc: ModuliContext, p: int = 1) -> List[Check]:
    ctx = mc.ctx
    P = mc.params
    inv = ctx.tag("X%d" % p, -1)
    out = []
    for b in CONF:
        for a in CONF:
            lap = mc.laplacian(b, a, inv)
            out.append(Check("eq4.19/component-b%da%d" % (b, a), mc.cleared_residual_terms(lap)))
            # bracket: eps [d d X - (1+q^2) X^-1 dX dX]
            br = ctx.zero()
            for (al, be), e in mc.T.eps_up.entries.items():
                ddx = mc.tw.partial(b, be, mc.dX(a, al, p))
                gg = mc.dX(b, be, p) * mc.dX(a, al, p)
                br = br + ddx.scale(e)
                br = br - (gg * ctx.tag("X%d" % p, -1)).scale(e * (P.one + P.q_power(2)))
            out.append(Check("eq4.19/bracket-b%da%d" % (b, a), mc.cleared_residual_terms(br),
                             "bracketed combination in the Laplacian of 1/X"))
    return out


# ----------------------------------------------------------------------
# t'Hooft ansatz


@dataclass
class ThooftSolution:
    P: int
    mc: ModuliContext
    A: List[List[NCPolynomial]]
    dPhi: Dict[Tuple[int, int], NCPolynomial]
    Phi_inv: NCPolynomial
    D2: Optional[List[List[object]]] = None
    notes: Dict[str, str] = field(default_factory=dict)
    curv: Optional[Tuple] = None


def sigma_matrix(mc: ModuliContext):
    """M^mu_be = eps^{sigma mu}(q) eps_{sigma be}(q)."""
    out = {}
    for (s1, mu), e1 in mc.T.eps_up.entries.items():
        for (s2, be), e2 in mc.T.eps_lo.entries.items():
            if s1 == s2:
                _acc(out, (mu, be), e1 * e2)
    return out


def build_thooft(P: int = 1, params: Optional[Params] = None, mc: Optional[ModuliContext] = None,
                 degree_cap: int = 10, prefactor_power: int = -3) -> ThooftSolution:
    """A^al_be = q^k dz^al_a (d^a_mu Phi) Phi^-1 eps^{sigma mu} eps_{sigma be}, k = ``prefactor_power``."""
    mc = mc or ModuliContext(P, params, degree_cap=degree_cap)
    ctx = mc.ctx
    pr = mc.params
    phi_inv = ctx.tag("X1", 1) if P == 1 else ctx.tag("Phi", -1)
    dPhi = {}
    for a in CONF:
        for mu in SPIN:
            acc = ctx.zero()
            for p in range(1, P + 1):
                acc = acc + mc._single_tag_derivative(a, mu, "X%d" % p, -1)
            dPhi[(a, mu)] = ctx.normal_form(acc)
    M = sigma_matrix(mc)
    q3 = pr.q_power(prefactor_power)
    A = [[ctx.zero(), ctx.zero()], [ctx.zero(), ctx.zero()]]
    for al in SPIN:
        for be in SPIN:
            acc = ctx.zero()
            for mu in SPIN:
                m = M.get((mu, be))
                if not m:
                    continue
                for a in CONF:
                    acc = acc + (ctx.gen("dz", al, a) * dPhi[(a, mu)] * phi_inv).scale(q3 * m)
            A[al - 1][be - 1] = ctx.normal_form(acc)
    return ThooftSolution(P, mc, A, dPhi, phi_inv)


def matmul_forms(ctx, X, Y):
    n = len(X)
    return [[ctx.normal_form(ctx.sum(X[i][k] * Y[k][j] for k in range(n))) for j in range(n)] for i in range(n)]


def curvature(sol: ThooftSolution):
    """(F, dA, A^2) with F = dA - A^2, computed once per solution."""
    if sol.curv is None:
        mc = sol.mc
        dA = [[mc.tw.exterior_derivative(x) for x in row] for row in sol.A]
        A2 = matmul_forms(mc.ctx, sol.A, sol.A)
        F = [[mc.ctx.normal_form(dA[i][j] - A2[i][j]) for j in range(2)] for i in range(2)]
        sol.curv = (F, dA, A2)
    return sol.curv


def verify_thooft_selfdual(sol: ThooftSolution) -> List[Check]:
    mc = sol.mc
    F, _, _ = curvature(sol)
    out = []
    for i in range(2):
        for j in range(2):
            asd = mc.tw.two_form_projection(F[i][j], mc.T.P4m)
            res = mc.cleared_residual_terms(F[i][j] - mc.tw.dual_2form(F[i][j]))
            out.append(Check("eq4.23/P%d-entry-%d%d" % (sol.P, i + 1, j + 1), res,
                             "F - *F cleared of denominators; P- part has %d raw terms" % len(asd)))
    return out


def gauge_algebra_residuals(ctx, A, RN):
    """(A R A + R A R A R)^{ik}_{mn} with the second term R^{ik}_{jl} A^j_r R^{rl}_{st} A^s_p R^{pt}_{mn}."""
    G = tuple(range(1, len(A) + 1))
    out = {}
    for i, k, m, n in itertools.product(G, repeat=4):
        acc = ctx.zero()
        for l, r in itertools.product(G, repeat=2):
            v = RN.get((l, k, r, n))
            if v:
                acc = acc + (A[i - 1][l - 1] * A[r - 1][m - 1]).scale(v)
        for j, l in itertools.product(G, repeat=2):
            v1 = RN.get((i, k, j, l))
            if not v1:
                continue
            for (r, ll, s_, t), v2 in RN.items():
                if ll != l:
                    continue
                for p in G:
                    v3 = RN.get((p, t, m, n))
                    if v3:
                        acc = acc + (A[j - 1][r - 1] * A[s_ - 1][p - 1]).scale(v1 * v2 * v3)
        out[(i, k, m, n)] = acc
    return out


def verify_thooft_gauge_algebra(sol: ThooftSolution) -> List[Check]:
    mc = sol.mc
    RN = build_glq_rmatrix(2, 1, mc.params).entries
    res = gauge_algebra_residuals(mc.ctx, sol.A, RN)
    return [Check("eq3.6/component-i%dk%dm%dn%d" % key, mc.cleared_residual_terms(r))
            for key, r in sorted(res.items())]


def solve_trace_metric(sol: ThooftSolution):
    """Solve sum D^be_al A^al_be = -q^3 dPhi Phi^-1 for the 2x2 metric D."""
    mc = sol.mc
    ctx = mc.ctx
    target = ctx.zero()
    for a in CONF:
        for al in SPIN:
            target = target + ctx.gen("dz", al, a) * sol.dPhi[(a, al)] * sol.Phi_inv
    target = ctx.normal_form(target.scale(-mc.params.q_power(3)))
    cols, labels = [], []
    for be in SPIN:
        for al in SPIN:
            cols.append(dict(sol.A[al - 1][be - 1].terms))
            labels.append((be, al))
    sol_vec, nullity = solve_linear(cols, dict(target.terms), mc.params.one)
    if sol_vec is None:
        return None
    D = [[mc.params.zero, mc.params.zero], [mc.params.zero, mc.params.zero]]
    for (be, al), v in zip(labels, sol_vec):
        D[be - 1][al - 1] = v
    sol.D2 = D
    sol.notes["D2_nullity"] = str(nullity)
    return D


def qtrace(sol: ThooftSolution, Mx) -> NCPolynomial:
    ctx = sol.mc.ctx
    acc = ctx.zero()
    for be in SPIN:
        for al in SPIN:
            d = sol.D2[be - 1][al - 1]
            if d:
                acc = acc + Mx[al - 1][be - 1].scale(d)
    return ctx.normal_form(acc)


def verify_trace_conditions(sol: ThooftSolution) -> List[Check]:
    mc = sol.mc
    out = []
    D = solve_trace_metric(sol)
    if D is None:
        out.append(Check("eq4.21/trace-metric", 1, "no metric solves Tq A = -q^3 dPhi Phi^-1"))
        return out
    out.append(Check("eq4.21/trace-metric", 0,
                     "D2 = [[%s, %s], [%s, %s]]" % tuple(str(x) for row in D for x in row)))
    F, dA, A2 = curvature(sol)
    alpha = qtrace(sol, sol.A)
    out.append(Check("eq3.13/alpha-nonzero", len(alpha), "Tq A must not vanish", expect_zero=False))
    out.append(Check("eq4.21/Tq-dA", mc.cleared_residual_terms(qtrace(sol, dA))))
    out.append(Check("eq3.14/d-alpha", mc.cleared_residual_terms(mc.tw.exterior_derivative(alpha))))
    out.append(Check("eq3.14/Tq-A2", mc.cleared_residual_terms(qtrace(sol, A2))))
    out.append(Check("eq3.14/Tq-F", mc.cleared_residual_terms(qtrace(sol, F))))
    return out


def bianchi_check(sol: ThooftSolution) -> List[Check]:
    mc = sol.mc
    ctx = mc.ctx
    F, _, _ = curvature(sol)
    AF = matmul_forms(ctx, sol.A, F)
    FA = matmul_forms(ctx, F, sol.A)
    out = []
    for i in range(2):
        for j in range(2):
            r = mc.tw.exterior_derivative(F[i][j]) - AF[i][j] + FA[i][j]
            out.append(Check("eq3.12/bianchi-%d%d" % (i + 1, j + 1), mc.cleared_residual_terms(r)))
    return out
