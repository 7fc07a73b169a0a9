"""Exact coefficient field for the q-twistor engine.

Elements are rational functions in ``s`` (with ``q = s**2``) and in the
multiparameters ``r(a,b)``, ``a < b``, over the rationals.  ``r(b,a)`` is
never stored; it is rewritten as ``1/r(a,b)`` and ``r(a,a) == 1``.

Two storage backends are used behind one type: numerator and denominator are
``flint.fmpz_poly`` (univariate in ``s``) whenever no ``r`` appears, and
``flint.fmpz_mpoly`` over a fixed context otherwise.  The choice is part of
the canonical form, so equality is plain structural comparison.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple, Union

import flint

MAX_R_INDEX = 8

_R_PAIRS = [(a, b) for a in range(1, MAX_R_INDEX + 1) for b in range(a + 1, MAX_R_INDEX + 1)]
_R_POS = {pair: i + 1 for i, pair in enumerate(_R_PAIRS)}
_NAMES = ("s",) + tuple("r%d_%d" % p for p in _R_PAIRS)
_CTX = flint.fmpz_mpoly_ctx.get(_NAMES, "lex")
_NVARS = len(_NAMES)

_UPOLY = flint.fmpz_poly
_MPOLY = flint.fmpz_mpoly
_U_ONE = _UPOLY([1])
_U_ZERO = _UPOLY([])


class DenominatorVanishes(ZeroDivisionError):
    """Raised when an evaluation point annihilates a denominator."""

    def __init__(self, polynomial: str, where: str = ""):
        self.polynomial = polynomial
        msg = "denominator %s vanishes" % polynomial
        if where:
            msg += " at " + where
        super().__init__(msg)


def _u_to_m(p):
    return _CTX.from_dict({(e,) + (0,) * (_NVARS - 1): int(c) for e, c in enumerate(p.coeffs()) if c})


def _m_is_univariate(p) -> bool:
    return not any(p.degrees()[1:])


def _m_to_u(p):
    d = p.to_dict()
    if not d:
        return _UPOLY([])
    deg = max(k[0] for k in d)
    coeffs = [0] * (deg + 1)
    for k, c in d.items():
        coeffs[k[0]] = int(c)
    return _UPOLY(coeffs)


def _lead(p):
    return p.leading_coefficient()


def _make(num, den) -> "Scalar":
    """Build a canonical Scalar from coprime-or-not numerator/denominator."""
    if num.is_zero():
        return ZERO
    if not den.is_one():
        g = num.gcd(den)
        if not g.is_one():
            num = num / g if isinstance(num, _MPOLY) else num // g
            den = den / g if isinstance(den, _MPOLY) else den // g
        if _lead(den) < 0:
            num, den = -num, -den
    if isinstance(num, _MPOLY):
        if _m_is_univariate(num) and _m_is_univariate(den):
            num, den = _m_to_u(num), _m_to_u(den)
    out = object.__new__(Scalar)
    out.num = num
    out.den = den
    return out


def _coerce_pair(x: "Scalar", y: "Scalar"):
    a, b, c, d = x.num, x.den, y.num, y.den
    if isinstance(a, _MPOLY) != isinstance(c, _MPOLY):
        if isinstance(a, _UPOLY):
            a, b = _u_to_m(a), _u_to_m(b)
        else:
            c, d = _u_to_m(c), _u_to_m(d)
    return a, b, c, d


def _exact_div(p, g):
    return p / g if isinstance(p, _MPOLY) else p // g


class Scalar:
    """Immutable element of Q(s, r(a,b))."""

    __slots__ = ("num", "den")

    def __init__(self, value: Union[int, Fraction, "Scalar"] = 0):
        if isinstance(value, Scalar):
            self.num, self.den = value.num, value.den
            return
        value = Fraction(value)
        self.num = _UPOLY([value.numerator]) if value.numerator else _UPOLY([])
        self.den = _UPOLY([value.denominator])

    # ------------------------------------------------------------------
    @staticmethod
    def s_power(k: int) -> "Scalar":
        if k >= 0:
            return _make(_UPOLY([0] * k + [1]), _U_ONE)
        return _make(_U_ONE, _UPOLY([0] * (-k) + [1]))

    @staticmethod
    def r(a: int, b: int) -> "Scalar":
        """The multiparameter r(a,b); r(b,a) = 1/r(a,b), r(a,a) = 1."""
        if a == b:
            return ONE
        lo, hi = min(a, b), max(a, b)
        if (lo, hi) not in _R_POS:
            raise ValueError("r(%d,%d) outside supported range 1..%d" % (a, b, MAX_R_INDEX))
        exps = [0] * _NVARS
        exps[_R_POS[(lo, hi)]] = 1
        var = _CTX.from_dict({tuple(exps): 1})
        one = _CTX.from_dict({(0,) * _NVARS: 1})
        if a < b:
            return _make(var, one)
        return _make(one, var)

    # ------------------------------------------------------------------
    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            try:
                other = Scalar(other)
            except (TypeError, ValueError):
                return NotImplemented
        if type(self.num) is not type(other.num):
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if isinstance(self.num, _UPOLY):
            return hash((tuple(int(c) for c in self.num.coeffs()), tuple(int(c) for c in self.den.coeffs())))
        return hash((tuple(sorted((k, int(v)) for k, v in self.num.to_dict().items())),
                     tuple(sorted((k, int(v)) for k, v in self.den.to_dict().items()))))

    def __neg__(self) -> "Scalar":
        out = object.__new__(Scalar)
        out.num = -self.num
        out.den = self.den
        return out

    def __add__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        a, b, c, d = _coerce_pair(self, other)
        if b == d:
            return _make(a + c, b)
        return _make(a * d + c * b, b * d)

    __radd__ = __add__

    def __sub__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Scalar":
        return (-self) + other

    def __mul__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        a, b, c, d = _coerce_pair(self, other)
        if b.is_one() and d.is_one():
            out = object.__new__(Scalar)
            out.num, out.den = a * c, b
            if isinstance(out.num, _MPOLY) and _m_is_univariate(out.num):
                out.num, out.den = _m_to_u(out.num), _U_ONE
            return out
        g1 = a.gcd(d)
        g2 = c.gcd(b)
        if not g1.is_one():
            a, d = _exact_div(a, g1), _exact_div(d, g1)
        if not g2.is_one():
            c, b = _exact_div(c, g2), _exact_div(b, g2)
        num, den = a * c, b * d
        if _lead(den) < 0:
            num, den = -num, -den
        out = object.__new__(Scalar)
        out.num, out.den = num, den
        if isinstance(num, _MPOLY) and _m_is_univariate(num) and _m_is_univariate(den):
            out.num, out.den = _m_to_u(num), _m_to_u(den)
        return out

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.num.is_zero():
            raise ZeroDivisionError("division by the zero Scalar")
        num, den = self.den, self.num
        if _lead(den) < 0:
            num, den = -num, -den
        out = object.__new__(Scalar)
        out.num, out.den = num, den
        return out

    def __truediv__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Scalar":
        return Scalar(other) * self.inverse()

    def __pow__(self, k: int) -> "Scalar":
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # ------------------------------------------------------------------
    def has_r(self) -> bool:
        return isinstance(self.num, _MPOLY)

    def conjugate(self) -> "Scalar":
        """Unit-circle involution: s -> 1/s and r(a,b) -> 1/r(a,b)."""
        if isinstance(self.num, _UPOLY):
            n, d = self.num, self.den
            rn = _UPOLY(list(reversed(n.coeffs())))
            rd = _UPOLY(list(reversed(d.coeffs())))
            dn, dd = n.degree(), d.degree()
            # n(1/s)/d(1/s) = rn * s^dd / (rd * s^dn)
            shift = dd - dn
            if shift >= 0:
                return _make(rn * _UPOLY([0] * shift + [1]), rd)
            return _make(rn, rd * _UPOLY([0] * (-shift) + [1]))
        n, d = self.num, self.den
        dn, dd = n.degrees(), d.degrees()

        def rev(p, degs):
            return _CTX.from_dict({tuple(D - e for D, e in zip(degs, k)): v for k, v in p.to_dict().items()})

        def mono(degs):
            return _CTX.from_dict({tuple(degs): 1})

        return _make(rev(n, dn) * mono(dd), rev(d, dd) * mono(dn))

    def evaluate(self, assignment: "ParamAssignment") -> Fraction:
        den = _eval_poly(self.den, assignment)
        if den == 0:
            raise DenominatorVanishes(_format_poly(self.den), str(assignment))
        return _eval_poly(self.num, assignment) / den

    def evaluate_fmpq(self, assignment: "ParamAssignment"):
        f = self.evaluate(assignment)
        return flint.fmpq(f.numerator, f.denominator)

    def __str__(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return "Scalar(%r)" % format_scalar(self)


ZERO = object.__new__(Scalar)
ZERO.num, ZERO.den = _U_ZERO, _U_ONE
ONE = object.__new__(Scalar)
ONE.num, ONE.den = _U_ONE, _U_ONE


def s() -> Scalar:
    return Scalar.s_power(1)


def q() -> Scalar:
    return Scalar.s_power(2)


def lam() -> Scalar:
    """The Hecke gap q - 1/q."""
    return Scalar.s_power(2) - Scalar.s_power(-2)


def r(a: int, b: int) -> Scalar:
    return Scalar.r(a, b)


# ----------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class ParamAssignment:
    """Numeric specialization: s -> s_value, r(a,b) -> r_values[(a,b)] (default 1)."""

    s_value: Fraction
    r_values: Mapping[Tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "s_value", Fraction(self.s_value))
        if self.s_value == 0:
            raise ValueError("s_value must be nonzero")
        rv = {}
        for (a, b), v in dict(self.r_values).items():
            v = Fraction(v)
            if v == 0:
                raise ValueError("r(%d,%d) must be nonzero" % (a, b))
            if a > b:
                a, b, v = b, a, 1 / v
            if a == b:
                if v != 1:
                    raise ValueError("r(a,a) is fixed to 1")
                continue
            rv[(a, b)] = v
        object.__setattr__(self, "r_values", rv)

    def r_value(self, a: int, b: int) -> Fraction:
        return self.r_values.get((a, b), Fraction(1))

    def __str__(self) -> str:
        parts = ["s=%s" % self.s_value]
        parts += ["r(%d,%d)=%s" % (a, b, v) for (a, b), v in sorted(self.r_values.items())]
        return ", ".join(parts)

    def __hash__(self):
        return hash((self.s_value, tuple(sorted(self.r_values.items()))))


def _eval_poly(p, a: ParamAssignment) -> Fraction:
    sv = a.s_value
    if isinstance(p, _UPOLY):
        v = p(flint.fmpq(sv.numerator, sv.denominator))
        return Fraction(int(v.p), int(v.q))
    vals = [sv] + [a.r_value(*pair) for pair in _R_PAIRS]
    total = Fraction(0)
    for k, c in p.to_dict().items():
        term = Fraction(int(c))
        for v, e in zip(vals, k):
            if e:
                term *= v ** int(e)
        total += term
    return total


# ----------------------------------------------------------------------
# text form


def _var_name(i: int) -> str:
    if i == 0:
        return "s"
    a, b = _R_PAIRS[i - 1]
    return "r(%d,%d)" % (a, b)


def _format_monomial(exps) -> str:
    parts = []
    for i, e in enumerate(exps):
        if e == 1:
            parts.append(_var_name(i))
        elif e:
            parts.append("%s^%d" % (_var_name(i), e))
    return "*".join(parts)


def _format_poly(p) -> str:
    if isinstance(p, _UPOLY):
        terms = [((e,) + (0,) * (_NVARS - 1), int(c)) for e, c in enumerate(p.coeffs()) if c]
        terms.reverse()
    else:
        terms = sorted(((k, int(v)) for k, v in p.to_dict().items()), reverse=True)
    if not terms:
        return "0"
    out = []
    for k, c in terms:
        mono = _format_monomial(k)
        if not mono:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = "%d*%s" % (abs(c), mono)
        sign = "-" if c < 0 else "+"
        out.append((sign, body))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        text += sign + body
    return text


def _n_terms(p) -> int:
    if isinstance(p, _UPOLY):
        return sum(1 for c in p.coeffs() if c)
    return len(p.to_dict())


def format_scalar(x: Scalar) -> str:
    """Canonical text, e.g. ``(s^4-1)/s^2`` or ``r(1,2)/s^2``."""
    num = _format_poly(x.num)
    if x.den.is_one():
        return num
    den = _format_poly(x.den)
    if _n_terms(x.num) > 1:
        num = "(%s)" % num
    if _n_terms(x.den) > 1 or (isinstance(x.den, _MPOLY) and "*" in den) or (
            isinstance(x.den, _UPOLY) and "*" in den):
        den = "(%s)" % den
    return "%s/%s" % (num, den)


_TOKEN = re.compile(r"\s*(?:(\d+)|(s)|r\((\d+),(\d+)\)|(\^)|([-+*/()]))")


class ScalarParseError(ValueError):
    pass


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ScalarParseError("unexpected input at %d: %r" % (pos, text[pos:pos + 10]))
        pos = m.end()
        if m.group(1):
            out.append(("int", int(m.group(1))))
        elif m.group(2):
            out.append(("atom", Scalar.s_power(1)))
        elif m.group(3):
            out.append(("atom", Scalar.r(int(m.group(3)), int(m.group(4)))))
        elif m.group(5):
            out.append(("op", "^"))
        else:
            out.append(("op", m.group(6)))
    return out


def parse_scalar(text: str) -> Scalar:
    """Inverse of :func:`format_scalar`; also accepts negative exponents."""
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None)

    def take():
        nonlocal pos
        tok = toks[pos]
        pos += 1
        return tok

    def expr():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "+"):
            take()
        val = term() * sign
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            t = term()
            val = val + t if op == "+" else val - t
        return val

    def term():
        val = power()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            p = power()
            val = val * p if op == "*" else val / p
        return val

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            neg = False
            if peek() == ("op", "-"):
                take()
                neg = True
            kind, val = take()
            if kind != "int":
                raise ScalarParseError("exponent must be an integer")
            return base ** (-val if neg else val)
        return base

    def atom():
        kind, val = take() if pos < len(toks) else (None, None)
        if kind == "int":
            return Scalar(val)
        if kind == "atom":
            return val
        if (kind, val) == ("op", "("):
            v = expr()
            if take() != ("op", ")"):
                raise ScalarParseError("missing ')'")
            return v
        if (kind, val) == ("op", "-"):
            return -power()
        raise ScalarParseError("unexpected token %r" % (val,))

    try:
        out = expr()
    except IndexError:
        raise ScalarParseError("truncated expression %r" % text) from None
    if pos != len(toks):
        raise ScalarParseError("trailing input in %r" % text)
    return out


# ----------------------------------------------------------------------
# parameter sets used by tensor builders and reductions


class Params:
    """Supplies the constants (s, q, lambda, r) in one coefficient domain.

    ``Params.symbolic()`` yields :class:`Scalar` values; ``Params.numeric``
    yields exact ``flint.fmpq`` values at a fixed :class:`ParamAssignment`.
    With ``symbolic_r=False`` every r(a,b) is 1 (the standard R-matrix).
    """

    def __init__(self, assignment: Optional[ParamAssignment] = None, symbolic_r: bool = False,
                 r_overrides: Optional[Dict[Tuple[int, int], object]] = None):
        self.assignment = assignment
        self.symbolic_r = symbolic_r
        self.r_overrides = dict(r_overrides or {})

    @classmethod
    def symbolic(cls, symbolic_r: bool = False) -> "Params":
        return cls(None, symbolic_r)

    @classmethod
    def numeric(cls, s_value, r_values=None) -> "Params":
        return cls(ParamAssignment(Fraction(s_value), r_values or {}))

    @property
    def is_symbolic(self) -> bool:
        return self.assignment is None

    def const(self, value):
        if self.assignment is None:
            return Scalar(value)
        value = Fraction(value)
        return flint.fmpq(value.numerator, value.denominator)

    @property
    def zero(self):
        return self.const(0)

    @property
    def one(self):
        return self.const(1)

    def s_power(self, k: int):
        if self.assignment is None:
            return Scalar.s_power(k)
        v = self.assignment.s_value ** k
        return flint.fmpq(v.numerator, v.denominator)

    def q_power(self, k: int):
        return self.s_power(2 * k)

    @property
    def s(self):
        return self.s_power(1)

    @property
    def q(self):
        return self.s_power(2)

    @property
    def lam(self):
        return self.s_power(2) - self.s_power(-2)

    def r(self, a: int, b: int):
        if a == b:
            return self.one
        key = (min(a, b), max(a, b))
        if key in self.r_overrides:
            v = self.convert(self.r_overrides[key])
            return v if a < b else self.one / v
        if self.assignment is None:
            return Scalar.r(a, b) if self.symbolic_r else ONE
        v = self.assignment.r_value(*key)
        if a > b:
            v = 1 / v
        return flint.fmpq(v.numerator, v.denominator)

    def convert(self, x):
        """Bring a Scalar (or rational) into this domain."""
        if self.assignment is None:
            return x if isinstance(x, Scalar) else Scalar(x)
        if isinstance(x, Scalar):
            return x.evaluate_fmpq(self.assignment)
        if isinstance(x, flint.fmpq):
            return x
        x = Fraction(x)
        return flint.fmpq(x.numerator, x.denominator)

    def describe(self) -> str:
        if self.assignment is None:
            return "symbolic" + ("(r)" if self.symbolic_r else "")
        return "numeric(%s)" % self.assignment

    def __repr__(self) -> str:
        return "Params(%s)" % self.describe()


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, flint.fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError("not a rational: %r" % (x,))
