"""Sparse multivariate polynomials over exact rationals or complex doubles.

A :class:`MultiPoly` maps exponent tuples to coefficients.  Two scalar
modes are supported:

``"rational"``
    coefficients are :class:`fractions.Fraction`; every ring operation is
    exact.
``"complex"``
    coefficients are Python ``complex``.

Mixing modes promotes to ``"complex"``.  Values are immutable after
construction.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from types import MappingProxyType

import numpy as np

from .errors import ArityMismatch, DegreeMismatch

RATIONAL = "rational"
COMPLEX = "complex"
MODES = (RATIONAL, COMPLEX)

#: degree of the zero polynomial
NEG_INF = float("-inf")


def grlex_key(alpha):
    return (sum(alpha), alpha)


def exponents_of_degree(nvars, degree):
    """All exponent tuples of total degree `degree`, in lex-descending order."""
    if nvars == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in exponents_of_degree(nvars - 1, degree - first):
            yield (first,) + rest


def exponents_up_to(nvars, degree):
    """Exponent tuples of total degree <= `degree`, graded-lex ascending."""
    out = []
    for k in range(degree + 1):
        out.extend(sorted(exponents_of_degree(nvars, k)))
    return out


def multi_factorial(alpha):
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


def _coerce(c, mode):
    if mode == RATIONAL:
        if isinstance(c, Fraction):
            return c
        if isinstance(c, complex):
            if c.imag:
                raise TypeError("complex coefficient in rational mode")
            c = c.real
        if isinstance(c, (int, float, str)):
            return Fraction(c)
        return Fraction(c)
    return complex(c)


def _is_exact(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


class MultiPoly:
    __slots__ = ("_terms", "nvars", "mode")

    def __init__(self, terms=None, nvars=1, mode=RATIONAL):
        if mode not in MODES:
            raise ValueError(f"unknown scalar mode {mode!r}")
        acc = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != nvars:
                raise ArityMismatch(f"exponent {alpha} has length != {nvars}")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent in {alpha}")
            acc[alpha] = acc.get(alpha, 0) + _coerce(c, mode)
        self._terms = {a: c for a, c in acc.items() if c != 0}
        self.nvars = nvars
        self.mode = mode

    @classmethod
    def _raw(cls, terms, nvars, mode):
        # trusted constructor: terms already coerced, no zeros
        obj = cls.__new__(cls)
        obj._terms = terms
        obj.nvars = nvars
        obj.mode = mode
        return obj

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, nvars, mode=RATIONAL):
        return cls._raw({}, nvars, mode)

    @classmethod
    def constant(cls, c, nvars, mode=RATIONAL):
        return cls({(0,) * nvars: c}, nvars, mode)

    @classmethod
    def variable(cls, j, nvars, mode=RATIONAL):
        """The coordinate x_{j+1} (0-based index `j`)."""
        alpha = [0] * nvars
        alpha[j] = 1
        return cls({tuple(alpha): 1}, nvars, mode)

    @classmethod
    def monomial(cls, alpha, coeff=1, mode=RATIONAL):
        return cls({tuple(alpha): coeff}, len(alpha), mode)

    # -- inspection -------------------------------------------------------

    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def items(self):
        """(exponent, coefficient) pairs in graded-lex descending order."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def coeff(self, alpha):
        return self._terms.get(tuple(alpha), 0)

    @property
    def degree(self):
        if not self._terms:
            return NEG_INF
        return max(sum(a) for a in self._terms)

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_homogeneous(self):
        return len({sum(a) for a in self._terms}) <= 1

    def homogeneous_part(self, k):
        return MultiPoly._raw(
            {a: c for a, c in self._terms.items() if sum(a) == k}, self.nvars, self.mode
        )

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, float, complex, Fraction)):
            return self == MultiPoly.constant(other, self.nvars, self._mode_for(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def __repr__(self):
        return f"MultiPoly({str(self)!r}, nvars={self.nvars}, mode={self.mode!r})"

    def __str__(self):
        return format_poly(self)

    # -- ring operations --------------------------------------------------

    def _mode_for(self, scalar):
        if self.mode == COMPLEX or isinstance(scalar, complex):
            return COMPLEX
        return RATIONAL

    def _lift(self, other):
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ArityMismatch(f"nvars {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, float, complex, Fraction)):
            return MultiPoly.constant(other, self.nvars, self._mode_for(other))
        return None

    def _common(self, other):
        mode = COMPLEX if COMPLEX in (self.mode, other.mode) else RATIONAL
        return self.as_mode(mode), other.as_mode(mode), mode

    def as_mode(self, mode):
        if mode == self.mode:
            return self
        if mode == COMPLEX:
            return MultiPoly._raw(
                {a: complex(c) for a, c in self._terms.items()}, self.nvars, COMPLEX
            )
        return MultiPoly(self._terms, self.nvars, RATIONAL)

    def to_complex(self):
        return self.as_mode(COMPLEX)

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        a, b, mode = self._common(other)
        out = dict(a._terms)
        for alpha, c in b._terms.items():
            v = out.get(alpha, 0) + c
            if v == 0:
                out.pop(alpha, None)
            else:
                out[alpha] = v
        return MultiPoly._raw(out, self.nvars, mode)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({a: -c for a, c in self._terms.items()}, self.nvars, self.mode)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s):
        mode = self._mode_for(s)
        s = _coerce(s, mode)
        if s == 0:
            return MultiPoly.zero(self.nvars, mode)
        base = self.as_mode(mode)
        return MultiPoly._raw({a: c * s for a, c in base._terms.items()}, self.nvars, mode)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, Fraction)):
            return self.scale(other)
        other = self._lift(other)
        if other is None:
            return NotImplemented
        a, b, mode = self._common(other)
        out = {}
        for al, ca in a._terms.items():
            for be, cb in b._terms.items():
                g = tuple(x + y for x, y in zip(al, be))
                out[g] = out.get(g, 0) + ca * cb
        return MultiPoly._raw({k: v for k, v in out.items() if v != 0}, self.nvars, mode)

    __rmul__ = __mul__

    def __truediv__(self, s):
        if isinstance(s, MultiPoly):
            if s.degree != 0:
                raise ZeroDivisionError("division only by nonzero constants")
            s = s.coeff((0,) * s.nvars)
        if self.mode == RATIONAL and _is_exact(s):
            return self.scale(Fraction(1) / Fraction(s))
        return self.scale(1 / s)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        out = MultiPoly.constant(1, self.nvars, self.mode)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- calculus ---------------------------------------------------------

    def diff(self, j, times=1):
        out = {}
        for alpha, c in self._terms.items():
            e = alpha[j]
            if e < times:
                continue
            f = 1
            for i in range(times):
                f *= e - i
            beta = alpha[:j] + (e - times,) + alpha[j + 1:]
            out[beta] = out.get(beta, 0) + c * f
        return MultiPoly._raw({k: v for k, v in out.items() if v != 0}, self.nvars, self.mode)

    def grad(self):
        return [self.diff(j) for j in range(self.nvars)]

    def laplacian(self):
        out = {}
        for alpha, c in self._terms.items():
            for j, e in enumerate(alpha):
                if e >= 2:
                    beta = alpha[:j] + (e - 2,) + alpha[j + 1:]
                    out[beta] = out.get(beta, 0) + c * (e * (e - 1))
        return MultiPoly._raw({k: v for k, v in out.items() if v != 0}, self.nvars, self.mode)

    # -- evaluation -------------------------------------------------------

    def __call__(self, *point):
        if len(point) == 1 and not isinstance(point[0], (int, float, complex, Fraction)):
            point = tuple(point[0])
        return self.eval(point)

    def eval(self, point):
        point = tuple(point)
        if len(point) != self.nvars:
            raise ArityMismatch(f"point of length {len(point)} for nvars={self.nvars}")
        total = 0
        for alpha, c in self._terms.items():
            term = c
            for x, e in zip(point, alpha):
                if e:
                    term = term * x**e
            total = total + term
        if self.mode == RATIONAL and all(_is_exact(x) for x in point):
            return Fraction(total)
        return total


def laplacian(p):
    return p.laplacian()


def evaluate(p, x):
    return p.eval(x)


def grad(p):
    return p.grad()


def evaluate_many(p, points):
    """Values of p at the rows of a float array (numpy, not exact)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != p.nvars:
        raise ArityMismatch(f"points have {pts.shape[1]} coordinates, polynomial has {p.nvars} variables")
    dtype = complex if p.mode == COMPLEX else float
    out = np.zeros(len(pts), dtype=dtype)
    for alpha, c in p.terms.items():
        term = np.full(len(pts), dtype(c), dtype=dtype)
        for j, a in enumerate(alpha):
            if a:
                term = term * pts[:, j] ** a
        out += term
    return out


def squared_norm(nvars, mode=RATIONAL):
    """|z|^2 = z_1^2 + ... + z_n^2 (no conjugation)."""
    terms = {}
    for j in range(nvars):
        alpha = [0] * nvars
        alpha[j] = 2
        terms[tuple(alpha)] = 1
    return MultiPoly(terms, nvars, mode)


def harmonic_projection(p):
    """Harmonic part of a homogeneous p in the Fischer decomposition p = h + |x|^2 q.

    h = sum_k (-1)^k |x|^(2k) laplacian^k(p) / (2^k k! prod_{j=1..k} (n + 2d - 2 - 2j)),
    d = deg p.
    """
    if p.is_zero():
        return p
    if not p.is_homogeneous():
        raise DegreeMismatch("harmonic projection needs a homogeneous polynomial")
    n, d = p.nvars, p.degree
    r2 = squared_norm(n, p.mode)
    out = p
    lap, power, denom = p, MultiPoly.constant(1, n, p.mode), 1
    for k in range(1, d // 2 + 1):
        lap = lap.laplacian()
        power = power * r2
        denom *= 2 * k * (n + 2 * d - 2 - 2 * k)
        if denom == 0:
            raise ZeroDivisionError("degenerate dimension for harmonic projection")
        term = (lap * power).scale(Fraction((-1) ** k, denom) if p.mode == RATIONAL else (-1) ** k / denom)
        out = out + term
    return out


def fischer_inner(f, g):
    """Fischer pairing sum over alpha of alpha! * f_alpha * conj(g_alpha).

    Both arguments must be homogeneous of the same degree; the zero
    polynomial is accepted alongside any degree.
    """
    if f.nvars != g.nvars:
        raise ArityMismatch(f"nvars {f.nvars} vs {g.nvars}")
    if not (f.is_homogeneous() and g.is_homogeneous()):
        raise DegreeMismatch("Fischer pairing needs homogeneous polynomials")
    if f and g and f.degree != g.degree:
        raise DegreeMismatch(f"degrees {f.degree} and {g.degree} differ")
    exact = f.mode == RATIONAL and g.mode == RATIONAL
    total = Fraction(0) if exact else 0j
    for alpha, c in f._terms.items():
        d = g._terms.get(alpha)
        if d is None:
            continue
        if not exact:
            d = complex(d).conjugate()
        total += multi_factorial(alpha) * c * d
    return total


def dot_power(xi, m):
    """Expand (z . conj(xi))^m as a homogeneous polynomial of degree m.

    Rational mode when every entry of `xi` is an int or Fraction (then
    conjugation is the identity), complex mode otherwise.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    xi = list(xi)
    n = len(xi)
    if all(_is_exact(x) for x in xi):
        mode = RATIONAL
        cx = [Fraction(x) for x in xi]
    else:
        mode = COMPLEX
        cx = [complex(x).conjugate() for x in xi]
    mf = math.factorial(m)
    terms = {}
    for alpha in exponents_of_degree(n, m):
        c = mf // multi_factorial(alpha)
        v = c
        for x, e in zip(cx, alpha):
            if e:
                v = v * x**e
        if v != 0:
            terms[alpha] = v
    return MultiPoly(terms, n, mode)


# -- text format ------------------------------------------------------------

def _fmt_real(x):
    if isinstance(x, Fraction):
        return str(x)
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


def _fmt_complex(c):
    re_, im = c.real, c.imag
    if im == 0:
        return _fmt_real(re_), re_ < 0
    if re_ == 0:
        body = f"{_fmt_real(im)}i"
        return f"({body})", False
    sign = "-" if im < 0 else "+"
    return f"({_fmt_real(re_)}{sign}{_fmt_real(abs(im))}i)", False


def _fmt_monomial(alpha):
    parts = []
    for j, e in enumerate(alpha):
        if e == 1:
            parts.append(f"x{j + 1}")
        elif e > 1:
            parts.append(f"x{j + 1}^{e}")
    return "*".join(parts)


def format_poly(p):
    if p.is_zero():
        return "0"
    out = []
    for alpha, c in p.items():
        mon = _fmt_monomial(alpha)
        if p.mode == RATIONAL:
            neg = c < 0
            mag = _fmt_real(abs(c))
        else:
            mag, neg = _fmt_complex(c)
            if neg:
                mag = _fmt_real(-c.real)
        if mon and mag == "1":
            body = mon
        elif mon:
            body = f"{mag}*{mon}"
        else:
            body = mag
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(out)


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)(?P<imag>[ij](?![\w]))?"
    r"|x(?P<var>\d+)"
    r"|(?P<unit>[ij])(?![\w])"
    r"|(?P<op>\*\*|[-+*/^()])"
    r")"
)


def _tokenize(text):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
        pos = m.end()
        if m.group("num") is not None:
            kind = "imag" if m.group("imag") else "num"
            toks.append((kind, m.group("num")))
        elif m.group("var") is not None:
            toks.append(("var", int(m.group("var"))))
        elif m.group("unit") is not None:
            toks.append(("imag", "1"))
        else:
            op = m.group("op")
            toks.append(("op", "^" if op == "**" else op))
    return toks


class _Parser:
    def __init__(self, toks, nvars, mode):
        self.toks = toks
        self.i = 0
        self.nvars = nvars
        self.mode = mode

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ValueError(f"expected {op!r}, got {val!r}")

    def const(self, c):
        return MultiPoly.constant(c, self.nvars, self.mode)

    def expr(self):
        out = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def _starts_atom(self):
        kind, val = self.peek()
        return kind in ("num", "imag", "var") or (kind == "op" and val == "(")

    def term(self):
        out = self.unary()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.unary()
                out = out * rhs if val == "*" else out / rhs
            elif self._starts_atom():
                out = out * self.unary()
            else:
                return out

    def unary(self):
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.unary()
            return -inner if val == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num" or not val.isdigit():
                raise ValueError("exponent must be a non-negative integer literal")
            base = base ** int(val)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.const(Fraction(val) if self.mode == RATIONAL else complex(float(val)))
        if kind == "imag":
            return self.const(complex(0, float(val)))
        if kind == "var":
            return MultiPoly.variable(val - 1, self.nvars, self.mode)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ValueError(f"unexpected token {val!r}")


def parse_poly(text, nvars=None, mode=None):
    """Parse text like ``"3/2*x1^2*x2 - x3 + 1"`` or ``"(1+2i)*x1"``.

    Variables are ``x1 .. xn``.  `nvars` defaults to the largest index seen
    (at least 1).  `mode` defaults to ``"complex"`` iff an imaginary unit
    appears.
    """
    toks = _tokenize(text)
    if not toks:
        raise ValueError("empty polynomial")
    if any(k == "var" and v < 1 for k, v in toks):
        raise ValueError("variables are numbered from x1")
    seen = max([v for k, v in toks if k == "var"], default=1)
    if nvars is None:
        nvars = seen
    elif seen > nvars:
        raise ArityMismatch(f"x{seen} used with nvars={nvars}")
    has_imag = any(k == "imag" for k, _ in toks)
    if mode is None:
        mode = COMPLEX if has_imag else RATIONAL
    if mode == RATIONAL and has_imag:
        raise ValueError("imaginary unit in rational mode")
    parser = _Parser(toks, nvars, mode)
    out = parser.expr()
    if parser.i != len(toks):
        raise ValueError(f"trailing input at token {parser.i}")
    return out


# -- JSON -------------------------------------------------------------------

def _coeff_to_str(c, mode):
    if mode == RATIONAL:
        return str(c)
    s, neg = _fmt_complex(c)
    if neg:
        return "-" + _fmt_real(-c.real)
    return s


def _coeff_from_str(s, mode):
    if mode == RATIONAL:
        return Fraction(s)
    s = s.strip().strip("()").replace("i", "j")
    return complex(s)


def to_json(p):
    """List of ``{"exponents": [...], "coeff": "..."}`` in graded-lex order."""
    return [
        {"exponents": list(alpha), "coeff": _coeff_to_str(c, p.mode)} for alpha, c in p.items()
    ]


def from_json(items, nvars=None, mode=None):
    items = list(items)
    if nvars is None:
        if not items:
            raise ValueError("nvars required for the zero polynomial")
        nvars = len(items[0]["exponents"])
    if mode is None:
        mode = COMPLEX if any(re.search("[ij]", str(t["coeff"])) for t in items) else RATIONAL
    terms = {}
    for t in items:
        alpha = tuple(t["exponents"])
        terms[alpha] = terms.get(alpha, 0) + _coeff_from_str(str(t["coeff"]), mode)
    return MultiPoly(terms, nvars, mode)

