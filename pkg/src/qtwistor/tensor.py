"""Sparse multi-index tensors and the constant tensors of the q-twistor calculus.

Index values are 1-based, as in the formulas they transcribe.  A four-index
tensor ``R[a, b, c, d]`` stands for ``R^{ab}_{cd}``: the upper pair labels the
row and the lower pair the column when it is used as an operator on V (x) V.
Three-leg products ``R12 R23 R12`` act on V (x) V (x) V with legs numbered
left to right.

Every builder takes a :class:`~qtwistor.coeff.Params` so the same code
produces symbolic (``Scalar``) or numeric (``fmpq``) tensors.
"""
from __future__ import annotations

import itertools
import json
from collections import deque
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .coeff import Params, Scalar, parse_scalar

Index = Tuple[int, ...]


class DimensionMismatch(ValueError):
    pass


class HeckeViolated(ValueError):
    pass


class InconsistentSymbol(ValueError):
    pass


class Tensor:
    """Immutable sparse tensor; zero entries are never stored."""

    __slots__ = ("dims", "entries", "name")

    def __init__(self, dims: Sequence[int], entries: Optional[Dict[Index, object]] = None, name: str = ""):
        self.dims = tuple(dims)
        clean = {}
        for k, v in (entries or {}).items():
            if len(k) != len(self.dims):
                raise DimensionMismatch("index %r does not match dims %r" % (k, self.dims))
            for i, d in zip(k, self.dims):
                if not 1 <= i <= d:
                    raise DimensionMismatch("index %r out of range for dims %r" % (k, self.dims))
            if v:
                clean[tuple(k)] = v
        self.entries = clean
        self.name = name

    # ------------------------------------------------------------------
    def __getitem__(self, idx) -> object:
        return self.entries.get(tuple(idx), 0)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def rank(self) -> int:
        return len(self.dims)

    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def items(self):
        return sorted(self.entries.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.dims == other.dims and (self - other).is_zero()

    def __repr__(self) -> str:
        return "Tensor(%s dims=%r nnz=%d)" % (self.name or "?", self.dims, self.nnz())

    # ------------------------------------------------------------------
    def _check_same(self, other: "Tensor"):
        if self.dims != other.dims:
            raise DimensionMismatch("dims %r vs %r" % (self.dims, other.dims))

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check_same(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out[k] + v if k in out else v
        return Tensor(self.dims, out)

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._check_same(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out[k] - v if k in out else -v
        return Tensor(self.dims, out)

    def __neg__(self) -> "Tensor":
        return Tensor(self.dims, {k: -v for k, v in self.entries.items()})

    def scale(self, c) -> "Tensor":
        return Tensor(self.dims, {k: c * v for k, v in self.entries.items()})

    def map(self, fn, name: str = "") -> "Tensor":
        return Tensor(self.dims, {k: fn(v) for k, v in self.entries.items()}, name or self.name)

    def permute(self, order: Sequence[int]) -> "Tensor":
        """New tensor whose axis i is axis ``order[i]`` of this one."""
        dims = tuple(self.dims[i] for i in order)
        return Tensor(dims, {tuple(k[i] for i in order): v for k, v in self.entries.items()})

    def trace(self, i: int, j: int) -> "Tensor":
        if self.dims[i] != self.dims[j]:
            raise DimensionMismatch("cannot trace axes of sizes %d, %d" % (self.dims[i], self.dims[j]))
        keep = [a for a in range(self.rank) if a not in (i, j)]
        out: Dict[Index, object] = {}
        for k, v in self.entries.items():
            if k[i] == k[j]:
                key = tuple(k[a] for a in keep)
                out[key] = out[key] + v if key in out else v
        return Tensor([self.dims[a] for a in keep], out)

    def full_trace_pairs(self) -> object:
        """Sum of entries with k[:n] == k[n:] (trace of an operator tensor)."""
        n = self.rank // 2
        total = 0
        for k, v in self.entries.items():
            if k[:n] == k[n:]:
                total = total + v
        return total

    def render(self) -> str:
        return dump_text(self)


def contract(t1: Tensor, t2: Tensor, pairing: Iterable[Tuple[int, int]]) -> Tensor:
    """Contract axis ``i`` of ``t1`` with axis ``j`` of ``t2`` for each pair.

    Remaining axes are ordered: free axes of ``t1``, then free axes of ``t2``.
    """
    pairing = list(pairing)
    for i, j in pairing:
        if t1.dims[i] != t2.dims[j]:
            raise DimensionMismatch("axis %d (%d) vs axis %d (%d)" % (i, t1.dims[i], j, t2.dims[j]))
    p1 = [i for i, _ in pairing]
    p2 = [j for _, j in pairing]
    f1 = [a for a in range(t1.rank) if a not in p1]
    f2 = [a for a in range(t2.rank) if a not in p2]
    index2: Dict[Index, List] = {}
    for k, v in t2.entries.items():
        index2.setdefault(tuple(k[j] for j in p2), []).append((tuple(k[a] for a in f2), v))
    out: Dict[Index, object] = {}
    for k, v in t1.entries.items():
        hits = index2.get(tuple(k[i] for i in p1))
        if not hits:
            continue
        head = tuple(k[a] for a in f1)
        for tail, w in hits:
            key = head + tail
            val = v * w
            out[key] = out[key] + val if key in out else val
    return Tensor([t1.dims[a] for a in f1] + [t2.dims[a] for a in f2], out)


def compose(t1: Tensor, t2: Tensor) -> Tensor:
    """Operator product of two 2n-index tensors (upper half = row)."""
    n = t1.rank // 2
    if t1.rank != t2.rank or t1.rank % 2:
        raise DimensionMismatch("compose needs two operator tensors of equal even rank")
    return contract(t1, t2, [(n + i, i) for i in range(n)])


def outer(t1: Tensor, t2: Tensor) -> Tensor:
    return contract(t1, t2, [])


def identity(dims: Sequence[int], params: Params = None, name: str = "I") -> Tensor:
    """Operator identity on the product space with the given leg sizes."""
    params = params or Params.symbolic()
    one = params.one
    entries = {}
    for k in itertools.product(*[range(1, d + 1) for d in dims]):
        entries[k + k] = one
    return Tensor(list(dims) * 2, entries, name)


def leg_operator(R: Tensor, legs: Tuple[int, int], n_legs: int, params: Params = None) -> Tensor:
    """Embed a two-leg operator ``R`` on legs ``legs`` of an n-leg space."""
    params = params or Params.symbolic()
    N = R.dims[0]
    a, b = legs
    others = [x for x in range(n_legs) if x not in legs]
    out = {}
    for (i, j, k, l), v in R.entries.items():
        for rest in itertools.product(range(1, N + 1), repeat=len(others)):
            up = [0] * n_legs
            lo = [0] * n_legs
            up[a], up[b], lo[a], lo[b] = i, j, k, l
            for x, val in zip(others, rest):
                up[x] = lo[x] = val
            out[tuple(up) + tuple(lo)] = v
    return Tensor([N] * (2 * n_legs), out)


# ----------------------------------------------------------------------
# R-matrices


def sign(x: int) -> int:
    return (x > 0) - (x < 0)


def build_glq_rmatrix(N: int, sgn: int = 1, params: Params = None) -> Tensor:
    """(R^{+-1})^{ab}_{cd} = d^a_c d^b_d [q^{+-1} - q^{sign(a-b)}] + r(ab) d^a_d d^b_c."""
    if N < 1:
        raise ValueError("N must be positive")
    if sgn not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    params = params or Params.symbolic()
    entries = {}
    for a in range(1, N + 1):
        for b in range(1, N + 1):
            diag = params.q_power(sgn) - params.q_power(sign(a - b))
            if a == b:
                entries[(a, a, a, a)] = diag + params.r(a, a)
                continue
            if diag:
                entries[(a, b, a, b)] = diag
            entries[(a, b, b, a)] = params.r(a, b)
    return Tensor([N] * 4, entries, "glq%d_rmatrix%s" % (N, "" if sgn == 1 else "_inv"))


def epsilon_upper(params: Params = None) -> Tensor:
    """eps^{12}(q) = 1/sqrt(q), eps^{21}(q) = -sqrt(q)."""
    params = params or Params.symbolic()
    return Tensor([2, 2], {(1, 2): params.s_power(-1), (2, 1): -params.s_power(1)}, "eps_upper")


def epsilon_lower(params: Params = None) -> Tensor:
    """eps_{12}(q) = -1/sqrt(q), eps_{21}(q) = sqrt(q)."""
    params = params or Params.symbolic()
    return Tensor([2, 2], {(1, 2): -params.s_power(-1), (2, 1): params.s_power(1)}, "eps_lower")


def build_slq2_rmatrix(params: Params = None) -> Tensor:
    """R^{ab}_{mn} = q d^a_m d^b_n + eps^{ab}(q) eps_{mn}(q)."""
    params = params or Params.symbolic()
    out = identity([2, 2], params).scale(params.q)
    eu, el = epsilon_upper(params), epsilon_lower(params)
    out = out + outer(eu, el)
    out.name = "slq2_rmatrix"
    return out


def inverse_hecke(R: Tensor, params: Params = None) -> Tensor:
    """R^{-1} = R - lambda I, valid for Hecke R."""
    params = params or Params.symbolic()
    N = R.dims[0]
    return R - identity([N, N], params).scale(params.lam)


def yang_baxter_residual(R: Tensor, params: Params = None) -> Tensor:
    """R12 R23 R12 - R23 R12 R23 on V (x) V (x) V."""
    _check_rmatrix_shape(R)
    params = params or Params.symbolic()
    R12 = leg_operator(R, (0, 1), 3, params)
    R23 = leg_operator(R, (1, 2), 3, params)
    return compose(compose(R12, R23), R12) - compose(compose(R23, R12), R23)


def hecke_residual(R: Tensor, params: Params = None) -> Tensor:
    """R^2 - I - lambda R."""
    _check_rmatrix_shape(R)
    params = params or Params.symbolic()
    N = R.dims[0]
    return compose(R, R) - identity([N, N], params) - R.scale(params.lam)


check_yang_baxter = yang_baxter_residual
check_hecke = hecke_residual


def _check_rmatrix_shape(R: Tensor):
    if R.rank != 4 or len(set(R.dims)) != 1:
        raise DimensionMismatch("expected an N x N x N x N tensor, got %r" % (R.dims,))


def projectors(R: Tensor, params: Params = None, check: bool = True) -> Tuple[Tensor, Tensor]:
    """P+ = (R + q^-1 I)/(q + q^-1) and P- = (q I - R)/(q + q^-1)."""
    params = params or Params.symbolic()
    if check and not hecke_residual(R, params).is_zero():
        raise HeckeViolated("R does not satisfy the Hecke relation")
    N = R.dims[0]
    I = identity([N, N], params)
    norm = params.q + params.q_power(-1)
    if not norm:
        from .coeff import DenominatorVanishes
        raise DenominatorVanishes("q+1/q", params.describe())
    inv = params.one / norm
    Pp = (R + I.scale(params.q_power(-1))).scale(inv)
    Pm = (I.scale(params.q) - R).scale(inv)
    Pp.name, Pm.name = "P_plus_%d" % N, "P_minus_%d" % N
    return Pp, Pm


# ----------------------------------------------------------------------
# deformed epsilon symbol


def build_epsilon_q(N: int = 4, params: Params = None) -> Tensor:
    """The GL_q(N) epsilon symbol, normalized by eps_q^{12..N} = 1.

    Values are propagated over permutations with the neighbour rule
    eps^{..ab..} = -q^{sign(b-a)} r(ba) eps^{..ba..}; every word reached twice
    is checked for agreement.
    """
    params = params or Params.symbolic()
    start = tuple(range(1, N + 1))
    values = {start: params.one}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for i in range(N - 1):
            b, a = w[i], w[i + 1]
            # w = (.. b a ..); target t = (.. a b ..) with eps^{t} = -q^{sign(b-a)} r(b,a) eps^{w}
            t = w[:i] + (a, b) + w[i + 2:]
            val = -params.q_power(sign(b - a)) * params.r(b, a) * values[w]
            if t in values:
                if values[t] != val:
                    raise InconsistentSymbol("eps_q%r disagrees along two reduced words" % (t,))
            else:
                values[t] = val
                queue.append(t)
    return Tensor([N] * N, values, "epsilon_q")


def epsilon_q_rule_residual(eps: Tensor, R: Tensor, params: Params = None) -> Dict[str, Tensor]:
    """Residuals of eps^{abcd} = -q R^{ba}_{fe} eps^{efcd} = [P-]^{ba}_{fe} eps^{efcd}.

    Checked for every neighbouring index pair, not only the first one.
    """
    params = params or Params.symbolic()
    _, Pm = projectors(R, params)
    N = eps.rank
    out = {}
    for pos in range(N - 1):
        for name, op in (("minus_qR", R.scale(-params.q)), ("P_minus", Pm)):
            # op^{ba}_{fe} eps^{..ef..}: contract op axes (3,2) with eps axes (pos, pos+1)
            t = contract(op, eps, [(3, pos), (2, pos + 1)])
            # t axes: (b, a, rest...) -> put a, b back into slots pos, pos+1
            rest = [x for x in range(N) if x not in (pos, pos + 1)]
            order = [None] * N
            order[pos] = 1
            order[pos + 1] = 0
            for slot, src in zip(rest, range(2, N)):
                order[slot] = src
            out["%s@%d" % (name, pos)] = t.permute(order) - eps
    return out


def epsilon_r_identity_residual(eps: Tensor, R: Tensor, params: Params = None) -> Tensor:
    """eps^{abcd} R^{a'h}_{ea} R^{b'e}_{fb} R^{c'f}_{gc} R^{d'g}_{h'd} - q d^h_{h'} eps^{a'b'c'd'}.

    Result axes: (a', b', c', d', h, h').
    """
    params = params or Params.symbolic()
    N = R.dims[0]
    out: Dict[Index, object] = {}
    Rl = {}
    for (u, v, w, x), val in R.entries.items():
        Rl.setdefault(x, []).append((u, v, w, val))
    # chain: start with eps^{abcd}, contract index d with R^{d'g}_{h'd}, etc.
    for (a, b, c, d), e0 in eps.entries.items():
        for a1, h, e, v1 in Rl.get(a, ()):
            for b1, e_, f, v2 in Rl.get(b, ()):
                if e_ != e:
                    continue
                for c1, f_, g, v3 in Rl.get(c, ()):
                    if f_ != f:
                        continue
                    for d1, g_, h1, v4 in Rl.get(d, ()):
                        if g_ != g:
                            continue
                        key = (a1, b1, c1, d1, h, h1)
                        val = e0 * v1 * v2 * v3 * v4
                        out[key] = out[key] + val if key in out else val
    for k, v in eps.entries.items():
        for h in range(1, N + 1):
            key = k + (h, h)
            val = -params.q * v
            out[key] = out[key] + val if key in out else val
    return Tensor([N] * 6, out, "eps_r_identity_residual")


# ----------------------------------------------------------------------
# reality structures


def build_charge_conjugation(params: Params = None) -> Tensor:
    """C(q) = diag(eps^{ab}(q), eps^{ab}(q)) as a 4 x 4 matrix C^a_b."""
    params = params or Params.symbolic()
    eu = epsilon_upper(params)
    entries = {}
    for (i, j), v in eu.entries.items():
        entries[(i, j)] = v
        entries[(i + 2, j + 2)] = v
    return Tensor([4, 4], entries, "charge_conjugation")


def matmul(A: Tensor, B: Tensor) -> Tensor:
    return contract(A, B, [(1, 0)])


def conjugate_tensor(t: Tensor) -> Tensor:
    """Apply the unit-circle involution entrywise (symbolic tensors only)."""
    return t.map(lambda v: v.conjugate() if isinstance(v, Scalar) else v, t.name + "_bar")


def pseudo_euclidean_residuals(R4: Tensor, R2: Tensor, params: Params = None) -> Dict[str, Tensor]:
    """bar(R^{ab}_{cd}) - (R^{-1})^{ba}_{dc} for the 4D and 2D R-matrices."""
    params = params or Params.symbolic()
    out = {}
    for label, R in (("eq2.22", R4), ("eq2.23", R2)):
        Rinv = inverse_hecke(R, params)
        out[label] = conjugate_tensor(R) - Rinv.permute([1, 0, 3, 2])
    return out


def euclidean_residuals(R4: Tensor, params: Params = None) -> Dict[str, Tensor]:
    """Residuals of the real-q charge-conjugation identities (conjugation = identity)."""
    params = params or Params.symbolic()
    C = build_charge_conjugation(params)
    eu, el = epsilon_upper(params), epsilon_lower(params)
    I4 = identity([4], params)
    I2 = identity([2], params)
    out = {}
    out["eq2.28"] = eu + el
    out["eq2.29/C_real"] = C - C
    out["eq2.29/C_squared"] = matmul(C, C) + I4
    # -eps^{ab} eps_{bg} (C^2)^b_a  -> delta
    ee = contract(eu, el, [(1, 0)])
    C2 = matmul(C, C)
    out["eq2.30"] = outer(ee, C2).scale(-params.one) - outer(I2, I4)
    # C^d_e C^c_f R^{fe}_{gh} C^g_a C^h_b  vs  R^{dc}_{ba}
    t = contract(C, R4, [(1, 1)])            # (d, f, g, h) from C^d_e R^{fe}_{gh}
    t = contract(C, t, [(1, 1)])             # (c, d, g, h)
    t = contract(t, C, [(2, 0)])             # (c, d, h, a)
    t = contract(t, C, [(2, 0)])             # (c, d, a, b)
    lhs = t.permute([1, 0, 3, 2])            # (d, c, b, a)
    out["eq2.31"] = lhs - R4
    return out


# ----------------------------------------------------------------------
# ADHM big R-matrix


def adhm_index(N: int, p: int):
    """Big index I in 1..N+2p: I <= N is a gauge index i, then (A, alpha) pairs."""
    gauge = {i: ("g", i) for i in range(1, N + 1)}
    tw = {}
    for A in range(1, p + 1):
        for al in (1, 2):
            tw[N + 2 * (A - 1) + al] = ("t", A, al)
    return {**gauge, **tw}


def build_adhm_rmatrix(N: int, p: int, params: Params = None) -> Tensor:
    """The GL_q(N+2p) block R-matrix assembled exactly as displayed.

    Blocks (upper pair -> lower pair):
      (i,k)->(m,n): (R_N)^{ik}_{mn}
      (A a, k)->(C m, n): lam d^A_C d^a_m d^k_n ;  (A a, k)->(m, D n): d^A_D d^a_n d^k_m
      (i, B b)->(C m, n): d^i_n d^B_C d^b_m
      (A a, B b)->(C m, D n): d^A_D d^B_C R^{ab}_{mn}
    """
    params = params or Params.symbolic()
    RN = build_glq_rmatrix(N, 1, params)
    R2 = build_slq2_rmatrix(params)
    M = N + 2 * p
    lab = adhm_index(N, p)
    inv = {v: k for k, v in lab.items()}
    out = {}
    for (i, k, m, n), v in RN.entries.items():
        out[(i, k, m, n)] = v
    for A in range(1, p + 1):
        for al in (1, 2):
            I = inv[("t", A, al)]
            for k in range(1, N + 1):
                out[(I, k, I, k)] = params.lam
                out[(I, k, k, I)] = params.one
                out[(k, I, I, k)] = params.one
    for A in range(1, p + 1):
        for B in range(1, p + 1):
            for (al, be, mu, nu), v in R2.entries.items():
                key = (inv[("t", A, al)], inv[("t", B, be)], inv[("t", B, mu)], inv[("t", A, nu)])
                out[key] = v
    return Tensor([M] * 4, out, "adhm_rmatrix_N%d_p%d" % (N, p))


def restrict(t: Tensor, ranges: Sequence[Sequence[int]]) -> Tensor:
    """Sub-tensor on the given index ranges, re-numbered from 1."""
    maps = [{v: i + 1 for i, v in enumerate(rg)} for rg in ranges]
    out = {}
    for k, v in t.entries.items():
        if all(x in m for x, m in zip(k, maps)):
            out[tuple(m[x] for x, m in zip(k, maps))] = v
    return Tensor([len(r) for r in ranges], out)


# ----------------------------------------------------------------------
# dump / load


def dump_text(t: Tensor) -> str:
    lines = []
    for k, v in t.items():
        lines.append("%s -> %s" % (",".join(str(i) for i in k), v))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_text(text: str, dims: Sequence[int], name: str = "") -> Tensor:
    entries = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        idx, val = line.split("->")
        entries[tuple(int(x) for x in idx.split(","))] = parse_scalar(val.strip())
    return Tensor(dims, entries, name)


def dump_tensor(t: Tensor, directory, name: str, params: Params = None) -> Tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    data = directory / (name + ".tensor")
    manifest = directory / (name + ".json")
    data.write_text(dump_text(t))
    meta = {
        "name": name,
        "dims": list(t.dims),
        "nnz": t.nnz(),
        "params": (params or Params.symbolic()).describe(),
        "data": data.name,
        "index_base": 1,
    }
    manifest.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return data, manifest


def load_tensor(manifest_path) -> Tensor:
    manifest_path = Path(manifest_path)
    meta = json.loads(manifest_path.read_text())
    text = (manifest_path.parent / meta["data"]).read_text()
    return parse_text(text, meta["dims"], meta["name"])
