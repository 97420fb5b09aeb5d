"""Exact normalized monomial moments over balls and ellipsoids.

The mean of x^alpha over the unit ball of R^N is zero unless every
alpha_j is even, and otherwise

    prod_j (alpha_j - 1)!!  /  prod_{i=1..K} (N + 2i),      K = |alpha| / 2,

a rational number (the pi factors of the Gamma-function formula cancel in
the normalized mean).  Means over an axis-aligned ellipsoid follow from the
substitution x_j -> a_j x_j, which only ever needs even powers of a_j, i.e.
powers of the squared semiaxes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import HarmonicityViolated, IrrationalScaling
from .geometry import Ellipsoid, confocal, volume
from .polyalg import RATIONAL, MultiPoly, exponents_of_degree, multi_factorial
from .report import VerificationReport, jsonable


def _double_factorial(k):
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@lru_cache(maxsize=65536)
def _ball_mean(alpha, n):
    if any(a & 1 for a in alpha):
        return Fraction(0)
    num = 1
    for a in alpha:
        num *= _double_factorial(a - 1)
    den = 1
    for i in range(1, sum(alpha) // 2 + 1):
        den *= n + 2 * i
    return Fraction(num, den)


def ball_mean(alpha, n=None) -> Fraction:
    """Mean of x^alpha over the unit ball in R^n (n defaults to len(alpha))."""
    alpha = tuple(int(a) for a in alpha)
    if n is None:
        n = len(alpha)
    if n < 1 or len(alpha) != n:
        raise ValueError("alpha must have length n >= 1")
    return _ball_mean(alpha, n)


@dataclass(frozen=True)
class NormalizedMoment:
    alpha: tuple
    value: object


def normalized_moment(alpha, e: Ellipsoid) -> NormalizedMoment:
    return NormalizedMoment(tuple(alpha), ellipsoid_mean(MultiPoly.monomial(alpha), e))


def ellipsoid_mean(p: MultiPoly, e: Ellipsoid):
    """(1/|e|) * integral of p over e.

    Exact (a Fraction) when p is rational and e has rational squared
    semiaxes; float or complex otherwise.
    """
    if p.nvars != e.dim:
        raise ValueError(f"polynomial has {p.nvars} variables, ellipsoid dimension {e.dim}")
    sq = e.squares
    exact = p.mode == RATIONAL and e.exact
    total = Fraction(0) if exact else 0.0
    for alpha, c in p.terms.items():
        if any(a & 1 for a in alpha):
            continue
        scale = 1
        for s, a in zip(sq, alpha):
            if a:
                scale = scale * s ** (a // 2)
        if exact and not isinstance(scale, (int, Fraction)):
            raise IrrationalScaling(f"non-rational scaling for {alpha}")
        total = total + c * scale * _ball_mean(alpha, e.dim)
    return total


def ellipsoid_integral(p: MultiPoly, e: Ellipsoid):
    """Integral of p over e (float; volume carries pi)."""
    m = ellipsoid_mean(p, e)
    return volume(e) * (complex(m) if isinstance(m, complex) else float(m))


def confocal_means(h: MultiPoly, e: Ellipsoid, lambdas):
    return [ellipsoid_mean(h, confocal(e, lam)) for lam in lambdas]


def maclaurin_check(h: MultiPoly, e: Ellipsoid, lambdas, tol=1e-12, require_harmonic=True):
    """Compare the means of `h` over the confocal ellipsoids e_lambda.

    Passes iff the means are identical (exact mode) or agree to `tol`
    relative (float mode).  With ``require_harmonic=False`` non-harmonic
    data is allowed, which is how negative controls are run.
    """
    if require_harmonic and not h.laplacian().is_zero():
        raise HarmonicityViolated(f"laplacian of {h} is not zero")
    lambdas = list(lambdas)
    means = confocal_means(h, e, lambdas)
    ref = means[0] if means else 0
    exact = all(isinstance(m, Fraction) for m in means)
    samples = []
    scale = max([abs(complex(m)) for m in means] + [0.0])
    for lam, m in zip(lambdas, means):
        if exact:
            ok = m == ref
            rel = 0.0 if ok else 1.0
            diff = abs(float(m - ref))
        else:
            diff = abs(complex(m) - complex(ref))
            rel = diff / scale if scale > 0 else 0.0
        samples.append(
            {
                "input": jsonable(lam),
                "value": jsonable(m),
                "reference": jsonable(ref),
                "abs_err": diff,
                "rel_err": rel,
            }
        )
    return VerificationReport.from_samples(
        "maclaurin",
        {"h": str(h), "ellipsoid": e.to_json(), "lambdas": jsonable(lambdas)},
        samples,
        tolerance=0.0 if exact else tol,
        exact=exact,
    )


def directional_power_mean(t, m, n=None):
    """Mean over the unit ball of (t . x)^m, by multinomial expansion.

    Depends on t only through sum t_k^2.
    """
    t = list(t)
    n = len(t) if n is None else n
    mf = math.factorial(m)
    exact = all(isinstance(x, (int, Fraction)) for x in t)
    total = Fraction(0) if exact else 0.0
    for alpha in exponents_of_degree(n, m):
        bm = _ball_mean(alpha, n)
        if not bm:
            continue
        c = mf // multi_factorial(alpha)
        v = c * bm
        for x, a in zip(t, alpha):
            if a:
                v = v * x**a
        total = total + v
    return total


def directional_power_constant(m, n):
    """c_m with directional_power_mean(t, m) = c_m * (sum t_k^2)^(m/2) for even m."""
    if m % 2:
        return Fraction(0)
    t = [1] + [0] * (n - 1)
    return directional_power_mean(t, m, n)
