"""Axis-aligned centred ellipsoids, confocal families and the focal ellipsoid."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import DegenerateFocal, EllipstoneError, LambdaOutOfRange, PointInside
from .polyalg import RATIONAL, MultiPoly


def _exact(x):
    if isinstance(x, bool):
        raise TypeError("bool is not a semiaxis")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    return None


def _exact_sqrt(q):
    """sqrt of a non-negative Fraction if it is rational, else None."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def unit_ball_volume(n):
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sphere_area(n):
    """Surface measure of the unit sphere S^{n-1} in R^n."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


class Ellipsoid:
    """{x : sum x_j^2 / a_j^2 <= 1} with a_1 >= ... >= a_N > 0.

    The squared semiaxes are the primary data.  They are held as exact
    Fractions whenever the input allows it (ints, Fractions, decimal strings,
    or squares of those) so that the defining quadratic and the moments stay
    exact; float input keeps float squares.
    """

    __slots__ = ("squares", "_axes")

    def __init__(self, semiaxes):
        semiaxes = list(semiaxes)
        axes, squares = [], []
        for a in semiaxes:
            q = _exact(a)
            if q is None:
                a = float(a)
                axes.append(a)
                squares.append(a * a)
            else:
                axes.append(q)
                squares.append(q * q)
        self._init(tuple(squares), tuple(axes))

    @classmethod
    def from_squares(cls, squares):
        obj = cls.__new__(cls)
        sq, axes = [], []
        for s in squares:
            q = _exact(s)
            if q is None:
                s = float(s)
                sq.append(s)
                axes.append(math.sqrt(s) if s > 0 else float("nan"))
            else:
                sq.append(q)
                r = _exact_sqrt(q)
                axes.append(r if r is not None else math.sqrt(q) if q > 0 else float("nan"))
        obj._init(tuple(sq), tuple(axes))
        return obj

    def _init(self, squares, axes):
        if not squares:
            raise EllipstoneError("ellipsoid needs at least one semiaxis")
        if any(s <= 0 for s in squares):
            raise EllipstoneError(f"semiaxes must be positive, got squares {squares}")
        if any(squares[j] < squares[j + 1] for j in range(len(squares) - 1)):
            raise EllipstoneError("semiaxes must be sorted non-increasing")
        self.squares = squares
        self._axes = axes

    # -- basic data -------------------------------------------------------

    @property
    def dim(self):
        return len(self.squares)

    @property
    def semiaxes(self):
        return self._axes

    @property
    def axes(self):
        """Semiaxes as a float array."""
        return np.array([float(a) for a in self._axes])

    @property
    def squares_float(self):
        return np.array([float(s) for s in self.squares])

    @property
    def exact(self):
        return all(isinstance(s, Fraction) for s in self.squares)

    @property
    def strict(self):
        sq = self.squares
        return all(sq[j] > sq[j + 1] for j in range(len(sq) - 1))

    @property
    def focal_nondegenerate(self):
        sq = self.squares
        return len(sq) >= 2 and sq[-2] > sq[-1]

    def __eq__(self, other):
        return isinstance(other, Ellipsoid) and self.squares == other.squares

    def __hash__(self):
        return hash(self.squares)

    def __repr__(self):
        return f"Ellipsoid({[_fmt(a) for a in self._axes]})"

    def to_json(self):
        return {"semiaxes": [_fmt(a) for a in self._axes], "squares": [_fmt(s) for s in self.squares]}

    def scaled(self, t):
        """The homothetic ellipsoid t * self."""
        t2 = Fraction(t) ** 2 if _exact(t) is not None else float(t) ** 2
        return Ellipsoid.from_squares([s * t2 for s in self.squares])

    def q_value(self, x):
        """Defining quadratic sum x_j^2/a_j^2 - 1 at a float point."""
        x = np.asarray(x, dtype=float)
        return float(np.sum(x * x / self.squares_float) - 1.0)


def _fmt(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    return float(x)


@dataclass(frozen=True)
class FocalEllipsoid:
    """Degenerate limit of the confocal family inside {x_N = 0}.

    `squares` are a_j^2 - a_N^2 for j < N.
    """

    base: Ellipsoid
    squares: tuple

    @property
    def semiaxes(self):
        return np.sqrt([float(s) for s in self.squares])

    @property
    def dim(self):
        return self.base.dim

    def contains(self, x, tol=0.0):
        """True if x lies on the closed focal ellipsoid (within `tol`)."""
        x = np.asarray(x, dtype=float)
        if abs(x[-1]) > tol:
            return False
        c2 = np.array([float(s) for s in self.squares])
        return float(np.sum(x[:-1] ** 2 / c2)) <= 1.0 + tol


def defining_quadratic(e: Ellipsoid) -> MultiPoly:
    n = e.dim
    terms = {}
    for j, s in enumerate(e.squares):
        alpha = [0] * n
        alpha[j] = 2
        terms[tuple(alpha)] = (Fraction(1) / s) if isinstance(s, Fraction) else 1.0 / s
    terms[(0,) * n] = -1
    return MultiPoly(terms, n, RATIONAL)


def _as_lambda(lam):
    q = _exact(lam) if not isinstance(lam, float) else None
    return q if q is not None else float(lam)


def confocal(e: Ellipsoid, lam) -> Ellipsoid:
    """Member of the confocal family with parameter `lam` (> -a_N^2)."""
    lam = _as_lambda(lam)
    if not lam > -e.squares[-1]:
        raise LambdaOutOfRange(f"lambda={lam} must exceed -a_N^2={-e.squares[-1]}")
    return Ellipsoid.from_squares([s + lam for s in e.squares])


def elliptic_lambda(e: Ellipsoid, x, rtol=1e-14, maxiter=200) -> float:
    """The lambda >= 0 with sum x_j^2/(a_j^2 + lambda) = 1 for x outside e.

    Safeguarded Newton on the monotone decreasing function
    f(lam) = sum x_j^2/(a_j^2+lam) - 1 inside the bracket
    [max(0, |x|^2 - a_1^2), |x|^2].
    """
    x = np.asarray(x, dtype=float)
    sq = e.squares_float
    x2 = x * x
    f0 = float(np.sum(x2 / sq)) - 1.0
    if f0 < -1e-15:
        raise PointInside(f"point {x.tolist()} is inside the ellipsoid (q={f0:.3e})")
    if f0 <= 0.0:
        return 0.0
    r2 = float(np.sum(x2))
    lo, hi = max(0.0, r2 - float(sq[0])), r2
    lam = 0.5 * (lo + hi)
    for _ in range(maxiter):
        d = sq + lam
        f = float(np.sum(x2 / d)) - 1.0
        if f > 0:
            lo = lam
        else:
            hi = lam
        fp = -float(np.sum(x2 / (d * d)))
        step = f / fp if fp else 0.0
        new = lam - step
        if not (lo < new < hi):
            new = 0.5 * (lo + hi)
        if abs(new - lam) <= rtol * max(abs(new), 1e-300) or hi - lo <= rtol * max(hi, 1e-300):
            return new
        lam = new
    return lam


def focal_ellipsoid(e: Ellipsoid) -> FocalEllipsoid:
    if e.dim < 2 or not e.focal_nondegenerate:
        raise DegenerateFocal(f"{e!r} has a_(N-1) = a_N; the focal set is lower dimensional")
    aN2 = e.squares[-1]
    return FocalEllipsoid(e, tuple(s - aN2 for s in e.squares[:-1]))


def volume(e: Ellipsoid) -> float:
    return unit_ball_volume(e.dim) * math.prod(float(a) for a in e.semiaxes)


def volume_derivative(e: Ellipsoid) -> float:
    """d/dlambda Vol(confocal(e, lambda)) at lambda = 0."""
    return volume(e) * 0.5 * float(np.sum(1.0 / e.squares_float))


def parse_ellipsoid(spec) -> Ellipsoid:
    """Inline comma list ``"3,2,1"`` or a path to ``{"semiaxes": [...]}``."""
    if isinstance(spec, Ellipsoid):
        return spec
    if isinstance(spec, (list, tuple)):
        return Ellipsoid(spec)
    spec = str(spec).strip()
    path = Path(spec)
    if spec.endswith(".json") or path.is_file():
        data = json.loads(path.read_text())
        return Ellipsoid([_json_number(v) for v in data["semiaxes"]])
    return Ellipsoid([v.strip() for v in spec.split(",") if v.strip()])


def _json_number(v):
    if isinstance(v, float):
        return Fraction(repr(v))
    return v
