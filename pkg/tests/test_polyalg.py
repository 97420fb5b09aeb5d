import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipstone.errors import ArityMismatch, DegreeMismatch
from ellipstone.polyalg import (
    COMPLEX,
    NEG_INF,
    MultiPoly,
    dot_power,
    evaluate_many,
    exponents_of_degree,
    fischer_inner,
    format_poly,
    from_json,
    harmonic_projection,
    parse_poly,
    squared_norm,
    to_json,
)


def P(text, n=None):
    return parse_poly(text, nvars=n)


def to_sympy(p):
    xs = sp.symbols(f"x1:{p.nvars + 1}")
    expr = 0
    for alpha, c in p.items():
        c = sp.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sp.nsimplify(c)
        expr += c * sp.Mul(*[x**a for x, a in zip(xs, alpha)])
    return sp.expand(expr), xs


def random_homogeneous(rng, n, deg, terms=4):
    out = {}
    exps = list(exponents_of_degree(n, deg))
    for _ in range(terms):
        alpha = exps[rng.integers(len(exps))]
        out[alpha] = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
    return MultiPoly(out, n)


# examples


def test_laplacian_examples():
    assert P("x1^2 + x2^2").laplacian() == P("4", 2)
    assert P("x1^2 - x2^2").laplacian().is_zero()
    assert P("x1^3*x2").laplacian() == P("6*x1*x2")


def test_fischer_examples():
    assert fischer_inner(P("x1^2", 2), P("x1^2", 2)) == 2
    assert fischer_inner(P("x1*x2"), P("x1^2", 2)) == 0
    assert fischer_inner(P("x1^3"), P("x1^3")) == 6


def test_dot_power_examples():
    assert dot_power([1, 0, 0], 3) == P("x1^3", 3)
    assert dot_power([1, 1], 1) == P("x1 + x2")
    got = dot_power([1, 1j, 0], 2)
    want = P("x1^2 - 2*i*x1*x2 - x2^2", 3)
    assert got.mode == COMPLEX
    for alpha in exponents_of_degree(3, 2):
        assert got.coeff(alpha) == pytest.approx(complex(want.coeff(alpha)))


def test_eval_grad_mul():
    assert P("x1^2 - x2^2").eval((3, 2)) == 5
    g = P("x1*x2").grad()
    assert g[0] == P("x2", 2) and g[1] == P("x1", 2)
    x1 = MultiPoly.variable(0, 1)
    assert x1 * x1 == P("x1^2")


def test_zero_degree_sentinel():
    z = MultiPoly.zero(3)
    assert z.degree is NEG_INF
    assert z.degree != -1
    assert z.degree < 0
    assert P("7", 2).degree == 0


def test_no_stored_zeros():
    p = P("x1 + x2") - P("x2", 2)
    assert list(p.terms) == [(1, 0)]
    assert all(len(a) == 2 for a in p.terms)


def test_arity_mismatch():
    with pytest.raises(ArityMismatch):
        P("x1", 1) + P("x1", 2)
    with pytest.raises(ArityMismatch):
        evaluate_many(P("x1*x2"), np.zeros((3, 3)))


def test_fischer_requires_same_degree():
    with pytest.raises(DegreeMismatch):
        fischer_inner(P("x1^2", 2), P("x2", 2))
    with pytest.raises(DegreeMismatch):
        fischer_inner(P("x1^2 + x2", 2), P("x1^2", 2))


def test_parse_format_roundtrip():
    p = P("3/4*x1^3*x2 - x2^2*x3 + 5", 3)
    assert parse_poly(format_poly(p), nvars=3) == p
    assert from_json(to_json(p), nvars=3) == p


def test_laplacian_matches_sympy():
    rng = np.random.default_rng(3)
    for n in (2, 3, 4):
        p = sum((random_homogeneous(rng, n, d) for d in range(6)), MultiPoly.zero(n))
        expr, xs = to_sympy(p)
        want = sp.expand(sum(sp.diff(expr, x, 2) for x in xs))
        assert sp.expand(to_sympy(p.laplacian())[0] - want) == 0


def test_evaluate_many_matches_scalar_eval():
    p = P("x1^3 - 2*x1*x2*x3 + 1/3*x3^2 - 4", 3)
    pts = np.random.default_rng(0).normal(size=(7, 3))
    vals = evaluate_many(p, pts)
    for x, v in zip(pts, vals):
        assert v == pytest.approx(float(p.eval(x)), rel=1e-13)


# invariants


coef = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def polys(draw, n=3, maxdeg=4):
    exps = [a for d in range(maxdeg + 1) for a in exponents_of_degree(n, d)]
    terms = draw(st.dictionaries(st.sampled_from(exps), coef, max_size=6))
    return MultiPoly(terms, n)


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p - p).is_zero()


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), st.fractions(min_value=-3, max_value=3, max_denominator=5))
def test_laplacian_linear(p, q, c):
    assert (p.scale(c) + q).laplacian() == p.laplacian().scale(c) + q.laplacian()


def test_fischer_adjointness_exact():
    rng = np.random.default_rng(11)
    for n in (2, 3, 4, 5):
        r2 = squared_norm(n)
        for k in range(2, 8):
            f = random_homogeneous(rng, n, k, terms=6)
            g = random_homogeneous(rng, n, k - 2, terms=6)
            assert fischer_inner(f.laplacian(), g) == fischer_inner(f, r2 * g)


def test_reproducing_identity_exact():
    rng = np.random.default_rng(12)
    for n in (2, 3, 4):
        for m in range(0, 7):
            f = random_homogeneous(rng, n, m, terms=5)
            xi = [Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))) for _ in range(n)]
            lhs = fischer_inner(f, dot_power(xi, m)) / math.factorial(m)
            assert lhs == f.eval(xi)


def test_reproducing_identity_float():
    rng = np.random.default_rng(13)
    for n in (2, 3, 5):
        for m in range(1, 7):
            f = random_homogeneous(rng, n, m, terms=5).to_complex()
            xi = rng.normal(size=n) + 1j * rng.normal(size=n)
            lhs = fischer_inner(f, dot_power(xi, m)) / math.factorial(m)
            ref = f.eval(xi)
            assert abs(lhs - ref) <= 1e-12 * max(abs(ref), 1.0)


def isotropic(rng, n):
    # xi = u + i v with u, v orthonormal pairs scaled equally: sum xi_j^2 = 0
    a = rng.normal(size=(n, 2))
    q, _ = np.linalg.qr(a)
    return q[:, 0] + 1j * q[:, 1]


def test_isotropic_dot_power_is_harmonic():
    rng = np.random.default_rng(14)
    for n in (2, 3, 4, 5):
        for m in range(1, 9):
            xi = isotropic(rng, n)
            assert abs(np.sum(xi * xi)) < 1e-14
            p = dot_power(xi, m)
            lap = p.laplacian()
            scale = max(abs(c) for c in p.terms.values())
            assert max((abs(c) for c in lap.terms.values()), default=0.0) <= 1e-12 * scale


def test_non_isotropic_dot_power_not_harmonic():
    assert not dot_power([1, 2, 0], 3).laplacian().is_zero()


def test_harmonic_projection():
    rng = np.random.default_rng(15)
    for n in (3, 4, 5):
        for d in range(0, 7):
            p = random_homogeneous(rng, n, d)
            h = harmonic_projection(p)
            assert h.laplacian().is_zero()
            # p - h is divisible by |x|^2: its Fischer pairing with every harmonic vanishes
            rest = p - h
            for alpha in list(exponents_of_degree(n, d))[:5]:
                g = harmonic_projection(MultiPoly.monomial(alpha))
                assert fischer_inner(rest, g) == 0
