from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest

from ellipstone.dirichlet import solve_dirichlet
from ellipstone.errors import HarmonicityViolated
from ellipstone.geometry import Ellipsoid, volume
from ellipstone.moments import (
    ball_mean,
    directional_power_constant,
    directional_power_mean,
    ellipsoid_integral,
    ellipsoid_mean,
    maclaurin_check,
)
from ellipstone.polyalg import MultiPoly, exponents_up_to, parse_poly


@lru_cache(maxsize=None)
def _ball_grid(n, order):
    """Tensor rule in hyperspherical coordinates (r, theta_1.., phi).

    In these variables the integrand is an entire function, so Gauss-Legendre
    in r and the polar angles converges geometrically; the periodic azimuth
    uses the trapezoid rule, exact for trigonometric polynomials.
    """
    t, w = np.polynomial.legendre.leggauss(order)
    r, wr = (t + 1) / 2, w / 2
    th, wth = (t + 1) * np.pi / 2, w * np.pi / 2
    ph, wph = 2 * np.pi * np.arange(order) / order, np.full(order, 2 * np.pi / order)
    axes = [r] + [th] * (n - 2) + [ph]
    weights = [wr] + [wth] * (n - 2) + [wph]
    grids = np.meshgrid(*axes, indexing="ij")
    wgrid = np.ones_like(grids[0])
    for k, wk in enumerate(weights):
        shape = [1] * n
        shape[k] = order
        wgrid = wgrid * wk.reshape(shape)
    jac = grids[0] ** (n - 1)
    x = []
    s = grids[0].copy()
    for k in range(1, n - 1):
        x.append(s * np.cos(grids[k]))
        jac = jac * np.sin(grids[k]) ** (n - 1 - k)
        s = s * np.sin(grids[k])
    x.append(s * np.cos(grids[-1]))
    x.append(s * np.sin(grids[-1]))
    wj = (wgrid * jac).ravel()
    return np.array([xi.ravel() for xi in x]), wj / wj.sum()


def cubature_ball_mean(alpha, order=20):
    x, w = _ball_grid(len(alpha), order)
    return float(np.prod([xi**a for xi, a in zip(x, alpha)], axis=0) @ w)


def double_factorial_oracle(alpha):
    # Gamma-ratio form of the ball moment, evaluated in floats
    from math import gamma, pi

    n = len(alpha)
    if any(a % 2 for a in alpha):
        return 0.0
    surf = 2 * np.prod([gamma((a + 1) / 2) for a in alpha]) / gamma((sum(alpha) + n) / 2)
    integral = surf / (sum(alpha) + n)
    ball = pi ** (n / 2) / gamma(n / 2 + 1)
    return integral / ball


def test_ball_mean_examples():
    assert ball_mean((2, 0, 0)) == Fraction(1, 5)
    assert ball_mean((1, 0)) == 0
    assert ball_mean((2, 2, 0)) == Fraction(1, 35)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ball_mean_against_cubature(n):
    for alpha in exponents_up_to(n, 8):
        ref = cubature_ball_mean(alpha)
        assert float(ball_mean(alpha)) == pytest.approx(ref, rel=1e-11, abs=1e-14)


def test_ball_mean_against_gamma_oracle():
    for n in (1, 2, 3, 4, 5):
        for alpha in exponents_up_to(n, 8):
            assert float(ball_mean(alpha)) == pytest.approx(double_factorial_oracle(alpha), rel=1e-13, abs=1e-16)


def test_ball_mean_signs():
    for alpha in exponents_up_to(3, 6):
        v = ball_mean(alpha)
        if any(a % 2 for a in alpha):
            assert v == 0
        else:
            assert v > 0


def test_ellipsoid_mean_examples():
    e = Ellipsoid([3, 2, 1])
    assert ellipsoid_mean(parse_poly("x1^2 - x2^2", 3), e) == 1
    assert ellipsoid_mean(MultiPoly.constant(1, 3), e) == 1
    assert ellipsoid_mean(parse_poly("x1", 3), e) == 0


def test_scaling_identity():
    e = Ellipsoid([3, 2, 1])
    alpha = (2, 4, 2)
    ref = volume(e) * 3**2 * 2**4 * 1**2 * float(ball_mean(alpha))
    assert ellipsoid_integral(MultiPoly.monomial(alpha), e) == pytest.approx(ref, rel=1e-14)


def test_maclaurin_examples():
    e = Ellipsoid([3, 2, 1])
    rep = maclaurin_check(parse_poly("x1^2 - x2^2", 3), e, [0, 1, 7])
    assert rep.passed and rep.exact
    assert all(s["value"] == 1 for s in rep.samples)
    assert maclaurin_check(MultiPoly.constant(5, 3), e, [0, 2]).passed
    # Re (x1 + i x2)^3 in the plane
    h = parse_poly("x1^3 - 3*x1*x2^2", 2)
    rep = maclaurin_check(h, Ellipsoid([3, 2]), [0, 1, 5, Fraction(1, 3)])
    assert rep.passed


def test_maclaurin_on_solved_harmonics():
    rng = np.random.default_rng(9)
    for e in (Ellipsoid([3, 2, 1]), Ellipsoid([4, 3, 2, 1])):
        terms = {a: Fraction(int(rng.integers(-5, 6))) for a in list(exponents_up_to(e.dim, 6))[::7]}
        u = solve_dirichlet(e, MultiPoly(terms, e.dim)).u
        assert maclaurin_check(u, e, [0, 1, Fraction(5, 2), 40]).passed


def test_maclaurin_negative_control():
    e = Ellipsoid([3, 2, 1])
    with pytest.raises(HarmonicityViolated):
        maclaurin_check(parse_poly("x1^2 + x2^2 + x3^2", 3), e, [0, 1])
    rep = maclaurin_check(parse_poly("x1^2 + x2^2 + x3^2", 3), e, [0, 1, 7], require_harmonic=False)
    assert not rep.passed


def test_directional_power_rotation_invariant():
    rng = np.random.default_rng(10)
    for n in (3, 4):
        for m in (2, 4, 6):
            t = rng.normal(size=n)
            q, _ = np.linalg.qr(rng.normal(size=(n, n)))
            a = directional_power_mean(t, m)
            b = directional_power_mean(q @ t, m)
            assert a == pytest.approx(b, rel=1e-12)
            c = float(directional_power_constant(m, n)) * float(t @ t) ** (m // 2)
            assert a == pytest.approx(c, rel=1e-12)
    assert directional_power_mean([1, 2, 3], 3) == 0
