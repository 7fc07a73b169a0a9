"""Graded noncommutative algebras presented by linear and quadratic relations.

An :class:`AlgebraContext` owns an alphabet of typed letters (families with
index ranges), a set of commuting *tags* (formal central symbols such as
inverse powers of central elements, which live at the right end of every word
and pick up a scalar weight when moved past letters of given families), and a
relation ideal.

Two reduction routes are provided:

* the generic route row-reduces, per graded component, the span of all
  ``u * relation * v`` embeddings; it is exact but only practical for short
  words, and is used for dimension counts and cross-validation;
* the fast route turns the degree-2 relations into rewrite rules (pivot word
  -> combination of smaller words, lexicographic order on letter codes) and
  straightens words by adjacent rewriting.  It is canonical whenever all
  length-3 overlaps resolve (diamond lemma), which :meth:`overlap_failures`
  checks.

Letters are integer codes ordered by (family rank, indices); words are tuples
of codes.  A polynomial term is keyed by ``(word, tags)`` where ``tags`` is a
sorted tuple of ``(tag_name, exponent)`` pairs.
"""
from __future__ import annotations

import itertools
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .coeff import Params, Scalar, format_scalar, parse_scalar


class InhomogeneousRelation(ValueError):
    pass


class DegreeCapExceeded(RuntimeError):
    pass


class ReductionStuck(RuntimeError):
    pass


class PolynomialParseError(ValueError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    """A generator family: ``name[i1,...,ik]`` with 1-based index ranges."""

    name: str
    ranges: Tuple[int, ...]
    form_degree: int = 0
    rank: int = 0
    index_types: Tuple[str, ...] = ()


@dataclass(frozen=True)
class TagSpec:
    """A commuting formal symbol kept at the right end of words.

    ``weights[family] = k`` means ``tag^e * l = s^(k*e) * l * tag^e`` for every
    letter ``l`` of that family.
    """

    name: str
    weights: Dict[str, int] = field(default_factory=dict)

    def __hash__(self):
        return hash((self.name, tuple(sorted(self.weights.items()))))


Key = Tuple[Tuple[int, ...], Tuple[Tuple[str, int], ...]]


def _merge_tags(t1, t2):
    if not t1:
        return t2
    if not t2:
        return t1
    d = dict(t1)
    for k, e in t2:
        d[k] = d.get(k, 0) + e
    return tuple(sorted((k, e) for k, e in d.items() if e))


class NCPolynomial:
    """Finite linear combination of (word, tags) keys with field coefficients."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: "AlgebraContext", terms: Optional[Dict[Key, object]] = None):
        self.ctx = ctx
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    # -- construction helpers -----------------------------------------
    def copy(self) -> "NCPolynomial":
        return NCPolynomial(self.ctx, dict(self.terms))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def is_structurally_zero(self) -> bool:
        return not self.terms

    # -- linear structure -----------------------------------------------
    def __add__(self, other) -> "NCPolynomial":
        other = self.ctx.as_poly(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            if k in out:
                w = out[k] + v
                if w:
                    out[k] = w
                else:
                    del out[k]
            else:
                out[k] = v
        return NCPolynomial(self.ctx, out)

    __radd__ = __add__

    def __neg__(self) -> "NCPolynomial":
        return NCPolynomial(self.ctx, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> "NCPolynomial":
        return self + (-self.ctx.as_poly(other))

    def __rsub__(self, other) -> "NCPolynomial":
        return self.ctx.as_poly(other) - self

    def scale(self, c) -> "NCPolynomial":
        if not c:
            return NCPolynomial(self.ctx)
        return NCPolynomial(self.ctx, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other) -> "NCPolynomial":
        if not isinstance(other, NCPolynomial):
            return self.scale(self.ctx.params.convert(other) if isinstance(other, int) else other)
        ctx = self.ctx
        out: Dict[Key, object] = {}
        for (w1, t1), c1 in self.terms.items():
            for (w2, t2), c2 in other.terms.items():
                c = c1 * c2
                if t1:
                    wt = ctx.tag_weight(t1, w2)
                    if wt != 1:
                        c = c * wt
                key = (w1 + w2, _merge_tags(t1, t2))
                if key in out:
                    out[key] = out[key] + c
                else:
                    out[key] = c
        return NCPolynomial(ctx, out)

    def __rmul__(self, other) -> "NCPolynomial":
        return self.scale(self.ctx.params.convert(other) if isinstance(other, int) else other)

    # -- grading ----------------------------------------------------------
    def degrees(self):
        return {len(w) for (w, _) in self.terms}

    def form_degrees(self):
        return {self.ctx.word_form_degree(w) for (w, _) in self.terms}

    def form_degree(self) -> int:
        fd = self.form_degrees()
        if len(fd) > 1:
            raise ValueError("polynomial is not homogeneous in form degree: %r" % sorted(fd))
        return fd.pop() if fd else 0

    def map_coefficients(self, fn) -> "NCPolynomial":
        return NCPolynomial(self.ctx, {k: fn(v) for k, v in self.terms.items()})

    def __str__(self) -> str:
        return self.ctx.render(self)

    def __repr__(self) -> str:
        return "NCPolynomial(%s)" % self.ctx.render(self)


class AlgebraContext:
    """Alphabet, tags and relation ideal, with cached reduction machinery."""

    def __init__(self, families: Sequence[FamilySpec], params: Optional[Params] = None,
                 tags: Sequence[TagSpec] = (), degree_cap: int = 10,
                 weight_fn: Optional[Callable[[str, Tuple[int, ...]], Iterable]] = None,
                 name: str = ""):
        self.params = params or Params.symbolic()
        self.name = name
        self.degree_cap = degree_cap
        self.families = {f.name: f for f in families}
        order = sorted(families, key=lambda f: f.rank)
        self.letters: List[Tuple[str, Tuple[int, ...]]] = []
        for f in order:
            for idx in itertools.product(*[range(1, r + 1) for r in f.ranges]):
                self.letters.append((f.name, idx))
        self.code = {l: i for i, l in enumerate(self.letters)}
        self.family_of = [f for f, _ in self.letters]
        self.letter_form = [self.families[f].form_degree for f, _ in self.letters]
        self.tags = {t.name: t for t in tags}
        self.weight_fn = weight_fn
        self._letter_weight = None
        if weight_fn is not None:
            self._letter_weight = [tuple(sorted(Counter(weight_fn(f, idx)).items())) for f, idx in self.letters]
        self.linear_relations: List[NCPolynomial] = []
        self.quadratic_relations: List[NCPolynomial] = []
        self.frozen = False
        self.subst: Dict[int, Dict[int, object]] = {}
        self.rules: Dict[Tuple[int, int], List[Tuple[Tuple[int, int], object]]] = {}
        self._nf_cache: Dict[Tuple[int, ...], Dict[Tuple[int, ...], object]] = {}
        self._ins_cache: Dict[Tuple[int, Tuple[int, ...]], Dict[Tuple[int, ...], object]] = {}
        self._tag_weight_cache = {}
        self._generic_cache = {}
        self.expansions: Dict[str, NCPolynomial] = {}

    # ------------------------------------------------------------------
    # letters, words, constructors
    def letter(self, family: str, *idx: int) -> int:
        try:
            return self.code[(family, tuple(idx))]
        except KeyError:
            raise KeyError("no letter %s%r in this alphabet" % (family, tuple(idx))) from None

    def gen(self, family: str, *idx: int) -> NCPolynomial:
        return NCPolynomial(self, {((self.letter(family, *idx),), ()): self.params.one})

    def word(self, *codes: int, coeff=None) -> NCPolynomial:
        return NCPolynomial(self, {(tuple(codes), ()): self.params.one if coeff is None else coeff})

    def const(self, c) -> NCPolynomial:
        c = self.params.convert(c)
        return NCPolynomial(self, {((), ()): c})

    def one(self) -> NCPolynomial:
        return self.const(1)

    def zero(self) -> NCPolynomial:
        return NCPolynomial(self)

    def tag(self, name: str, exponent: int = 1, coeff=None) -> NCPolynomial:
        if name not in self.tags:
            raise KeyError("unknown tag %r" % name)
        return NCPolynomial(self, {((), ((name, exponent),) if exponent else ()): self.params.one if coeff is None else coeff})

    def as_poly(self, x) -> NCPolynomial:
        if isinstance(x, NCPolynomial):
            return x
        return self.const(x)

    def sum(self, polys: Iterable[NCPolynomial]) -> NCPolynomial:
        out: Dict[Key, object] = {}
        for p in polys:
            for k, v in p.terms.items():
                out[k] = out[k] + v if k in out else v
        return NCPolynomial(self, out)

    def word_form_degree(self, w: Tuple[int, ...]) -> int:
        lf = self.letter_form
        return sum(lf[c] for c in w)

    def multidegree(self, w: Tuple[int, ...]) -> Tuple[Tuple[str, int], ...]:
        return tuple(sorted(Counter(self.family_of[c] for c in w).items()))

    def word_weight(self, w: Tuple[int, ...]):
        if self._letter_weight is None:
            return ()
        total = Counter()
        for c in w:
            for k, n in self._letter_weight[c]:
                total[k] += n
        return tuple(sorted(total.items()))

    def tag_weight(self, tags, word):
        """Scalar picked up by moving ``tags`` to the right across ``word``."""
        if not tags or not word:
            return 1
        fams = Counter(self.family_of[c] for c in word)
        power = 0
        for name, e in tags:
            wts = self.tags[name].weights
            for fam, n in fams.items():
                k = wts.get(fam)
                if k:
                    power += k * e * n
        if power == 0:
            return 1
        return self.params.s_power(power)

    # ------------------------------------------------------------------
    # relations
    def add_linear(self, polys: Iterable[NCPolynomial]):
        self._check_mutable()
        for p in polys:
            if not p:
                continue
            if p.degrees() != {1} or any(t for (_, t) in p.terms):
                raise InhomogeneousRelation("linear relation must be a combination of single letters")
            self._check_homogeneous(p)
            self.linear_relations.append(p)

    def add_quadratic(self, polys: Iterable[NCPolynomial]):
        self._check_mutable()
        for p in polys:
            if not p:
                continue
            if p.degrees() != {2} or any(t for (_, t) in p.terms):
                raise InhomogeneousRelation("quadratic relation must be a combination of two-letter words")
            self._check_homogeneous(p)
            self.quadratic_relations.append(p)

    def _check_mutable(self):
        if self.frozen:
            raise RuntimeError("context %r is frozen" % self.name)

    def _check_homogeneous(self, p: NCPolynomial):
        fds = {self.word_form_degree(w) for (w, _) in p.terms}
        if len(fds) > 1:
            raise InhomogeneousRelation("mixed form degree %r in relation" % sorted(fds))
        mds = {self.multidegree(w) for (w, _) in p.terms}
        if len(mds) > 1:
            raise InhomogeneousRelation("mixed multidegree %r in relation" % sorted(mds))
        if self._letter_weight is not None:
            wts = {self.word_weight(w) for (w, _) in p.terms}
            if len(wts) > 1:
                raise InhomogeneousRelation("relation is not homogeneous in the index weight")

    def freeze(self) -> "AlgebraContext":
        """Derive the letter substitution and the rewrite rules."""
        if self.frozen:
            return self
        # linear relations -> substitution for pivot letters
        rows = []
        for p in self.linear_relations:
            rows.append({w[0]: c for (w, _), c in p.terms.items()})
        basis = row_reduce(rows)
        self.subst = {}
        for piv, row in basis.items():
            self.subst[piv] = {l: -c for l, c in row.items() if l != piv}
        # quadratic relations after substitution, grouped by grading
        groups = defaultdict(list)
        for p in self.quadratic_relations:
            sp = self._substitute_letters(p)
            row = {w: c for (w, _), c in sp.terms.items()}
            if not row:
                continue
            w0 = next(iter(row))
            groups[(self.multidegree(w0), self.word_weight(w0))].append(row)
        self.rules = {}
        for rows in groups.values():
            for piv, row in row_reduce(rows).items():
                self.rules[piv] = [(w, -c) for w, c in row.items() if w != piv]
        self.frozen = True
        return self

    def define(self, linear: Iterable[NCPolynomial] = (), quadratic: Iterable[NCPolynomial] = ()) -> "AlgebraContext":
        self.add_linear(linear)
        self.add_quadratic(quadratic)
        return self.freeze()

    # ------------------------------------------------------------------
    # reduction (fast route)
    def _substitute_letters(self, p: NCPolynomial) -> NCPolynomial:
        if not self.subst:
            return p
        out: Dict[Key, object] = {}
        for (w, t), c in p.terms.items():
            if not any(l in self.subst for l in w):
                out[(w, t)] = out[(w, t)] + c if (w, t) in out else c
                continue
            partial = {(): c}
            for l in w:
                opts = self.subst.get(l)
                nxt = {}
                if opts is None:
                    for pw, pc in partial.items():
                        nxt[pw + (l,)] = pc
                else:
                    for pw, pc in partial.items():
                        for m, mc in opts.items():
                            key = pw + (m,)
                            val = pc * mc
                            nxt[key] = nxt[key] + val if key in nxt else val
                partial = nxt
            for pw, pc in partial.items():
                key = (pw, t)
                out[key] = out[key] + pc if key in out else pc
        return NCPolynomial(self, out)

    def normal_form(self, p: NCPolynomial) -> NCPolynomial:
        """Canonical representative of ``p`` modulo the relation ideal."""
        if not self.frozen:
            self.freeze()
        p = self._substitute_letters(self.as_poly(p))
        out: Dict[Key, object] = {}
        for (w, t), c in p.terms.items():
            if len(w) > self.degree_cap:
                raise DegreeCapExceeded("word of length %d exceeds degree cap %d" % (len(w), self.degree_cap))
            for u, d in self._nf_word(w).items():
                key = (u, t)
                v = c * d
                if key in out:
                    v = out[key] + v
                    if v:
                        out[key] = v
                    else:
                        del out[key]
                else:
                    out[key] = v
        return NCPolynomial(self, out)

    def is_zero(self, p: NCPolynomial) -> bool:
        return not self.normal_form(p).terms

    def _nf_word(self, w: Tuple[int, ...]):
        cached = self._nf_cache.get(w)
        if cached is not None:
            return cached
        if len(w) <= 1:
            res = {w: self.params.one}
        else:
            res = {}
            for t, c in self._nf_word(w[1:]).items():
                for u, d in self._insert(w[0], t).items():
                    v = c * d
                    if u in res:
                        v = res[u] + v
                        if v:
                            res[u] = v
                        else:
                            del res[u]
                    else:
                        res[u] = v
        self._nf_cache[w] = res
        return res

    def _insert(self, x: int, t: Tuple[int, ...]):
        """Normal form of ``x * t`` for a normal word ``t``."""
        key = (x, t)
        cached = self._ins_cache.get(key)
        if cached is not None:
            return cached
        rule = self.rules.get((x, t[0])) if t else None
        if rule is None:
            res = {(x,) + t: self.params.one}
        else:
            res = {}
            rest = t[1:]
            for (m1, m2), c in rule:
                for u, d in self._insert(m2, rest).items():
                    cd = c * d
                    for v, e in self._insert(m1, u).items():
                        val = cd * e
                        if v in res:
                            val = res[v] + val
                            if val:
                                res[v] = val
                            else:
                                del res[v]
                        else:
                            res[v] = val
        self._ins_cache[key] = res
        return res

    def is_normal_word(self, w: Tuple[int, ...]) -> bool:
        if any(l in self.subst for l in w):
            return False
        return not any((w[i], w[i + 1]) in self.rules for i in range(len(w) - 1))

    def clear_caches(self):
        self._nf_cache.clear()
        self._ins_cache.clear()

    # ------------------------------------------------------------------
    # confluence and dimensions
    def overlap_failures(self, limit: Optional[int] = None) -> List[Tuple[Tuple[int, int, int], NCPolynomial]]:
        """Length-3 ambiguities ``abc`` whose two reductions disagree."""
        self.freeze()
        by_first = defaultdict(list)
        for (a, b) in self.rules:
            by_first[a].append(b)
        failures = []
        for (a, b), rhs in self.rules.items():
            for c in by_first.get(b, ()):
                left = NCPolynomial(self)
                for (m1, m2), coef in rhs:
                    left = left + self._poly_from(self._nf_word((m1, m2, c))).scale(coef)
                right = NCPolynomial(self)
                for (m1, m2), coef in self.rules[(b, c)]:
                    right = right + self._poly_from(self._nf_word((a, m1, m2))).scale(coef)
                # (a m1 m2) is reduced with the strategy that reduces the tail first; force a full
                # reduction of a*(rhs of bc) and (rhs of ab)*c
                diff = left - right
                if diff:
                    failures.append(((a, b, c), diff))
                    if limit and len(failures) >= limit:
                        return failures
        return failures

    def _poly_from(self, d) -> NCPolynomial:
        return NCPolynomial(self, {(w, ()): c for w, c in d.items()})

    def normal_words(self, multidegree: Dict[str, int]):
        """All normal words with the given per-family letter counts."""
        self.freeze()
        fams = sorted(multidegree.items(), key=lambda kv: self.families[kv[0]].rank)
        total = sum(n for _, n in fams)
        allowed = [c for c in range(len(self.letters)) if c not in self.subst and multidegree.get(self.family_of[c], 0)]
        out = []

        def extend(prefix, counts):
            if len(prefix) == total:
                out.append(tuple(prefix))
                return
            for c in allowed:
                f = self.family_of[c]
                if counts[f] >= multidegree[f]:
                    continue
                if prefix and (prefix[-1], c) in self.rules:
                    continue
                counts[f] += 1
                prefix.append(c)
                extend(prefix, counts)
                prefix.pop()
                counts[f] -= 1

        extend([], Counter())
        return out

    def pbw_dimension(self, multidegree) -> int:
        """Dimension of a graded component, counted by the generic route."""
        if isinstance(multidegree, int):
            raise TypeError("pass a mapping family -> count")
        total = sum(multidegree.values())
        if total > self.degree_cap:
            raise DegreeCapExceeded("degree %d exceeds cap %d" % (total, self.degree_cap))
        dim = 0
        for comp in self._generic_components(multidegree):
            words, basis = comp
            dim += len(words) - len(basis)
        return dim

    def normal_word_count(self, multidegree) -> int:
        return len(self.normal_words(dict(multidegree)))

    # ------------------------------------------------------------------
    # generic route
    def _component_words(self, multidegree):
        letters_by_fam = defaultdict(list)
        for c, f in enumerate(self.family_of):
            if c not in self.subst and f in multidegree:
                letters_by_fam[f].append(c)
        total = sum(multidegree.values())
        out = []

        def extend(prefix, counts):
            if len(prefix) == total:
                out.append(tuple(prefix))
                return
            for f, n in multidegree.items():
                if counts[f] < n:
                    counts[f] += 1
                    for c in letters_by_fam[f]:
                        prefix.append(c)
                        extend(prefix, counts)
                        prefix.pop()
                    counts[f] -= 1

        extend([], Counter())
        return out

    def _generic_components(self, multidegree):
        key = tuple(sorted(multidegree.items()))
        if key in self._generic_cache:
            return self._generic_cache[key]
        self.freeze()
        rels = []
        for p in self.quadratic_relations:
            sp = self._substitute_letters(p)
            row = {w: c for (w, _), c in sp.terms.items()}
            if row:
                rels.append(row)
        by_pair = defaultdict(list)
        for i, row in enumerate(rels):
            for w in row:
                by_pair[w].append(i)
        words = self._component_words(dict(multidegree))
        classes = defaultdict(list)
        for w in words:
            classes[self.word_weight(w)].append(w)
        comps = []
        for ws in classes.values():
            emb = set()
            for w in ws:
                for i in range(len(w) - 1):
                    for ri in by_pair.get((w[i], w[i + 1]), ()):
                        emb.add((w[:i], ri, w[i + 2:]))
            rows = []
            for u, ri, v in emb:
                rows.append({u + m + v: c for m, c in rels[ri].items()})
            comps.append((ws, row_reduce(rows)))
        self._generic_cache[key] = comps
        return comps

    def generic_normal_form(self, p: NCPolynomial) -> NCPolynomial:
        """Normal form by per-component elimination (slow, exact reference)."""
        self.freeze()
        p = self._substitute_letters(p)
        bycomp = defaultdict(dict)
        for (w, t), c in p.terms.items():
            bycomp[(self.multidegree(w), t)][w] = c
        out = {}
        for (md, t), row in bycomp.items():
            md = dict(md)
            basis = {}
            for _, b in self._generic_components(md):
                basis.update(b)
            row = dict(row)
            for w in list(row):
                if w in basis and w in row:
                    c = row[w]
                    for u, d in basis[w].items():
                        v = row.get(u, 0) - c * d
                        if v:
                            row[u] = v
                        else:
                            row.pop(u, None)
            for w, c in row.items():
                out[(w, t)] = c
        return NCPolynomial(self, out)

    # ------------------------------------------------------------------
    # substitution of composites
    def substitute(self, p: NCPolynomial, family: str, definition: Callable[[Tuple[int, ...]], NCPolynomial]) -> NCPolynomial:
        """Replace every letter of ``family`` by ``definition(indices)`` and reduce.

        ``p`` may live in another context that has the composite family; the
        result lives in this context.
        """
        src = p.ctx
        out = NCPolynomial(self)
        for (w, t), c in p.terms.items():
            acc = NCPolynomial(self, {((), ()): c})
            for l in w:
                fam, idx = src.letters[l]
                if fam == family:
                    acc = acc * definition(idx)
                else:
                    acc = acc * self.gen(fam, *idx)
            if t:
                acc = acc * NCPolynomial(self, {((), t): self.params.one})
            out = out + acc
        return self.normal_form(out)

    def multiply(self, p1: NCPolynomial, p2: NCPolynomial) -> NCPolynomial:
        return self.normal_form(p1 * p2)

    # ------------------------------------------------------------------
    # text format
    def render_word(self, w, tags=()) -> str:
        parts = []
        for c in w:
            fam, idx = self.letters[c]
            parts.append("%s[%s]" % (fam, ",".join(str(i) for i in idx)))
        for name, e in tags:
            parts.append(name if e == 1 else "%s^%d" % (name, e))
        return " ".join(parts) if parts else "1"

    def render(self, p: NCPolynomial) -> str:
        if not p.terms:
            return "0"
        out = []
        for (w, t), c in sorted(p.terms.items(), key=lambda kv: (len(kv[0][0]), kv[0])):
            out.append("%s * %s" % (_fmt_coeff(c), self.render_word(w, t)))
        return " + ".join(out)

    def parse(self, text: str) -> NCPolynomial:
        text = text.strip()
        if text == "0":
            return NCPolynomial(self)
        out = NCPolynomial(self)
        for term in _split_top(text):
            if " * " not in term:
                raise PolynomialParseError("term %r lacks 'coeff * word'" % term)
            cs, ws = term.split(" * ", 1)
            coeff = self.params.convert(parse_scalar(cs.strip()))
            word = []
            tags = []
            for tok in ws.split():
                if tok == "1":
                    continue
                m = re.fullmatch(r"([A-Za-z_~][\w~]*)\[([\d,]+)\]", tok)
                if m:
                    idx = tuple(int(x) for x in m.group(2).split(","))
                    word.append(self.letter(m.group(1), *idx))
                    continue
                m = re.fullmatch(r"([A-Za-z_][\w]*)(?:\^(-?\d+))?", tok)
                if m and m.group(1) in self.tags:
                    tags.append((m.group(1), int(m.group(2) or 1)))
                    continue
                raise PolynomialParseError("cannot parse symbol %r" % tok)
            out = out + NCPolynomial(self, {(tuple(word), tuple(sorted(tags))): coeff})
        return out


def _fmt_coeff(c) -> str:
    if isinstance(c, Scalar):
        return format_scalar(c)
    return str(c)


def _split_top(text: str) -> List[str]:
    parts, depth, cur = [], 0, []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and text.startswith(" + ", i):
            parts.append("".join(cur))
            cur = []
            i += 3
            continue
        cur.append(ch)
        i += 1
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def row_reduce(rows: Iterable[Dict[object, object]]) -> Dict[object, Dict[object, object]]:
    """Fully reduced echelon basis of the span of sparse rows.

    Keys must be totally ordered; the pivot of each basis row is its largest
    key and carries coefficient 1.  Every basis row contains no other pivot.
    """
    basis: Dict[object, Dict[object, object]] = {}
    for row in rows:
        r = {k: v for k, v in row.items() if v}
        # reduce against existing pivots
        for piv in [k for k in r if k in basis]:
            c = r.get(piv)
            if not c:
                continue
            for k, v in basis[piv].items():
                w = r.get(k, 0) - c * v
                if w:
                    r[k] = w
                else:
                    r.pop(k, None)
        if not r:
            continue
        piv = max(r)
        inv = 1 / r[piv] if not hasattr(r[piv], "inverse") else r[piv].inverse()
        r = {k: v * inv for k, v in r.items()}
        # back-substitute into existing rows
        for bp, brow in basis.items():
            c = brow.get(piv)
            if c:
                for k, v in r.items():
                    w = brow.get(k, 0) - c * v
                    if w:
                        brow[k] = w
                    else:
                        brow.pop(k, None)
        basis[piv] = r
    return basis


def solve_linear(columns: Sequence[Dict[object, object]], target: Dict[object, object], one):
    """Solve sum_j x_j * columns[j] = target for field-valued x.

    Returns (solution list, nullity) with free unknowns set to zero, or
    (None, None) when the system is inconsistent.
    """
    keys = sorted(set(k for col in columns for k in col) | set(target))
    n = len(columns)
    # rows of the augmented system, keyed by unknown index (n = rhs)
    rows = []
    for k in keys:
        r = {j: col[k] for j, col in enumerate(columns) if col.get(k)}
        if target.get(k):
            r[n] = target[k]
        if r:
            rows.append(r)
    # eliminate with pivots on smallest unknown index (rhs last)
    basis = {}
    for row in rows:
        r = dict(row)
        for piv in sorted(k for k in r if k in basis):
            c = r.get(piv)
            if not c:
                continue
            for k, v in basis[piv].items():
                w = r.get(k, 0) - c * v
                if w:
                    r[k] = w
                else:
                    r.pop(k, None)
        if not r:
            continue
        piv = min(r)
        if piv == n:
            return None, None
        inv = r[piv].inverse() if hasattr(r[piv], "inverse") else 1 / r[piv]
        r = {k: v * inv for k, v in r.items()}
        for bp, brow in basis.items():
            c = brow.get(piv)
            if c:
                for k, v in r.items():
                    w = brow.get(k, 0) - c * v
                    if w:
                        brow[k] = w
                    else:
                        brow.pop(k, None)
        basis[piv] = r
    sol = [one * 0 for _ in range(n)]
    for piv, r in basis.items():
        sol[piv] = r.get(n, one * 0)
    return sol, n - len(basis)


def define_algebra(families: Sequence[FamilySpec], linear_relations=(), quadratic_relations=(),
                   params: Optional[Params] = None, tags: Sequence[TagSpec] = (), **kw) -> AlgebraContext:
    """Build and freeze a context from relation-producing callables or polynomials.

    ``linear_relations`` / ``quadratic_relations`` may be iterables of
    polynomials, or callables taking the fresh context and returning them.
    """
    ctx = AlgebraContext(families, params, tags, **kw)
    lin = linear_relations(ctx) if callable(linear_relations) else linear_relations
    quad = quadratic_relations(ctx) if callable(quadratic_relations) else quadratic_relations
    return ctx.define(lin, quad)
