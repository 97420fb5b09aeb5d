"""Newtonian potentials of solid ellipsoids (N >= 3).

The kernel is C_N |x - y|^(2-N) with C_N = 1/|S^(N-1)|, so the volume
potential U of an ellipsoid satisfies laplacian(U) = -(N-2) inside (-1 for
N = 3).

Three quadrature routes are used:

* interior points: polar coordinates centred at x.  The radial integral is
  done in closed form, leaving smooth spherical integrals of the distance
  R(w) from x to the boundary along direction w:
  U(x) = C_N * int R^2/2 dw and grad U(x) = C_N (N-2) int w R dw.
* boundary points: the same, over the inward hemisphere only.
* exterior points: the unit-ball rule mapped onto the ellipsoid.

The mother-body measure lives on the focal ellipsoid E; in the scaled
variable y' = c * eta its density becomes 2 prod(a) sqrt(1 - |eta|^2), whose
square-root edge is absorbed by a Gauss-Jacobi radial rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import quadrature as quad
from .errors import (
    DegenerateFocal,
    EllipstoneError,
    FitResidualTooLarge,
    PathTouchesFocalSet,
    PointNotExterior,
    PointNotInCavity,
    TargetAccuracyNotMet,
)
from .geometry import Ellipsoid, focal_ellipsoid, sphere_area, volume
from .kernels import kernel_sums
from .parallel import pmap
from .report import VerificationReport, rel_sample

SPHERE_ORDERS = (8, 12, 16, 20, 24, 32, 48, 64, 96, 128)
BALL_ORDERS = (12, 16, 20, 24, 32, 48, 64, 96, 128, 160)
FOCAL_ORDERS = (16, 24, 32, 48, 64, 96, 128, 192, 256, 384)

EXTERIOR_TOL = 1e-10  # conservative: the reported error bound is for the coarser order
INTERIOR_TOL = 1e-6
BOUNDARY_EPS = 1e-13


def normalizer(n):
    """C_N = 1/Vol(S^(N-1))."""
    return 1.0 / sphere_area(n)


def _check_dim(e):
    if e.dim < 3:
        raise EllipstoneError("Newtonian potentials are implemented for N >= 3 only")


def _point(e, x):
    x = np.asarray(x, dtype=float).ravel()
    if x.shape != (e.dim,):
        raise EllipstoneError(f"point of dimension {x.size} for an ellipsoid in R^{e.dim}")
    return x


@dataclass
class Estimate:
    """Cubature result with its convergence record."""

    value: object
    error: float
    order: int
    history: list = field(default_factory=list)


def _adaptive(evaluate, orders, tol, what):
    """Raise the order until successive estimates agree to `tol` (relative).

    `evaluate(order)` returns (value, scale); value may be a vector and scale
    is the magnitude used to relativize the difference.
    """
    prev = None
    history = []
    for n in orders:
        val, scale = evaluate(n)
        val = np.asarray(val, dtype=float)
        if prev is not None:
            err = float(np.max(np.abs(val - prev)))
            history.append((n, err))
            if err <= tol * max(scale, 1e-300):
                return Estimate(val if val.ndim else float(val), err, n, history)
        prev = val
    raise TargetAccuracyNotMet(
        f"{what}: estimates did not settle to rel. tol {tol:g} by order {orders[-1]}",
        estimate=val if val.ndim else float(val),
        error=history[-1][1] if history else None,
    )


# -- interior / boundary: distances to the boundary along rays ----------------

def ray_lengths(e: Ellipsoid, x, dirs):
    """Distance from x (inside or on the boundary) to the boundary along each direction."""
    inv = 1.0 / e.squares_float
    a = (dirs * dirs) @ inv
    b = dirs @ (x * inv)
    c = float(np.sum(x * x * inv)) - 1.0
    s = np.sqrt(np.maximum(b * b - a * c, 0.0))
    # positive root of a R^2 + 2 b R + c = 0, cancellation-free
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(b > 0, -c / (b + s), (s - b) / a)
    return np.maximum(r, 0.0)


def _interior_rule(e, x, n):
    q = e.q_value(x)
    if q > -BOUNDARY_EPS:
        normal = x / e.squares_float
        frame = quad.rotation_to(normal)
        loc, w = quad.hemisphere_rule(e.dim, n)
        return loc @ frame.T, w
    return quad.sphere_rule(e.dim, n)


def _interior_eval(e, x, n, with_grad):
    dirs, w = _interior_rule(e, x, n)
    r = ray_lengths(e, x, dirs)
    cn = normalizer(e.dim)
    val = cn * float(w @ (0.5 * r * r))
    if not with_grad:
        return val, None
    g = cn * (e.dim - 2) * ((w * r) @ dirs)
    return val, g


# -- exterior: mapped ball rule -----------------------------------------------

def _shell_sums(x, radial, dirs, wd, scale_pts, offset, weight_scale, power, with_grad):
    """Kernel sums over a radial x spherical product rule, one block of shells at a time.

    Node = offset + scale_pts * (r * dir); fixed blocking keeps the summation
    order deterministic.
    """
    r, wr = radial
    d = len(x)
    val, grad = 0.0, np.zeros(d)
    per = max(1, CHUNK // len(wd))
    base = dirs * scale_pts
    for start in range(0, len(r), per):
        rr = r[start:start + per]
        nodes = (rr[:, None, None] * base[None, :, :]).reshape(-1, d) + offset
        w = (wr[start:start + per, None] * wd[None, :]).ravel() * weight_scale
        v, g = kernel_sums(x[None, :], nodes, w, power, with_grad)
        val += float(v[0])
        if with_grad:
            grad += g[0]
    return val, (grad if with_grad else None)


def _exterior_eval(e, x, n, with_grad):
    dirs, wd = quad.sphere_rule(e.dim, n)
    ax = e.axes
    return _shell_sums(x, quad.ball_radial(e.dim, n), dirs, wd, ax, 0.0,
                       float(np.prod(ax)) * normalizer(e.dim), e.dim - 2, with_grad)


@lru_cache(maxsize=64)
def _graded_unit_rule(k, m):
    """Composite Gauss-Legendre on [0, 1], panels growing by 4 from 2^-k."""
    x, w = quad.gauss_jacobi(m, 0, 0)
    breaks = [0.0]
    b = 2.0 ** (-k)
    while b < 1.0:
        breaks.append(b)
        b *= 4.0
    breaks.append(1.0)
    nodes, weights = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        nodes.append(lo + (hi - lo) * (x + 1) / 2)
        weights.append(w * (hi - lo) / 2)
    return np.concatenate(nodes), np.concatenate(weights)


def _near_exterior_eval(e, x, n, with_grad):
    """Exterior point close to the boundary: polar coordinates in the unit ball
    centred at the boundary point p = x~/|x~| (x~ = x/a), radially graded
    towards p so the near-singular kernel is resolved."""
    d = e.dim
    ax = e.axes
    xt = x / ax
    rad = float(np.linalg.norm(xt))
    p = xt / rad
    k = int(min(40, max(0, math.floor(-math.log2(max(rad - 1.0, 1e-12))))))
    s, ws = _graded_unit_rule(k, max(4, n // 2))
    # the chord shrinks to O(rad - 1) along near-tangent directions: grade t too
    loc, wd = quad.graded_hemisphere_rule(d, n, k)
    dirs_all = loc @ quad.rotation_to(p).T
    scale = float(np.prod(ax)) * normalizer(d)
    val, grad = 0.0, np.zeros(d)
    step = max(1, CHUNK // len(s))
    # fixed chunking keeps the summation order deterministic
    for start in range(0, len(wd), step):
        dirs = dirs_all[start:start + step]
        chord = -2.0 * (dirs @ p)
        rho = chord[:, None] * s[None, :]
        xi = p[None, None, :] + rho[:, :, None] * dirs[:, None, :]
        w = wd[start:start + step, None] * ws[None, :] * chord[:, None] ** d * s[None, :] ** (d - 1)
        v, g = kernel_sums(x[None, :], (xi * ax).reshape(-1, d), w.ravel() * scale, d - 2, with_grad)
        val += float(v[0])
        if with_grad:
            grad += g[0]
    return val, (grad if with_grad else None)


CHUNK = 1 << 20
NODE_BUDGET = 40_000_000


def _sphere_count(d, n):
    return 2 * n ** (d - 1) if d >= 3 else 2 * n


DIR_BUDGET = 3_000_000


def _within_budget(orders, count, dirs=None):
    """Orders whose node count (and stored direction count) stay within budget."""
    dirs = dirs or (lambda n: 0)
    kept = tuple(n for n in orders if count(n) <= NODE_BUDGET and dirs(n) <= DIR_BUDGET)
    return kept if len(kept) >= 2 else tuple(orders[:2])


NEAR_ORDERS = (8, 12, 16, 20, 24, 32, 48, 64, 96, 128)
NEAR_FACTOR = 1.5


def _exterior_route(e, x):
    d = e.dim
    if float(np.linalg.norm(x / e.axes)) < NEAR_FACTOR:
        rad = float(np.linalg.norm(x / e.axes))
        panels = 2 + max(0, -math.log2(max(rad - 1.0, 1e-12))) / 2
        orders = _within_budget(NEAR_ORDERS, lambda n: _sphere_count(d, n) / 2 * panels * n / 2 * panels,
                                lambda n: _sphere_count(d, n) / 2 * panels)
        return _near_exterior_eval, orders
    return _exterior_eval, _within_budget(BALL_ORDERS, lambda n: _sphere_count(d, n) * n,
                                          lambda n: _sphere_count(d, n))


def volume_potential(e: Ellipsoid, x, tol=None, orders=None, full=False):
    """U_Omega(x) = C_N int_Omega |x - y|^(2-N) dy at any point."""
    _check_dim(e)
    x = _point(e, x)
    q = e.q_value(x)
    if q < -BOUNDARY_EPS or abs(q) <= BOUNDARY_EPS:
        tol = INTERIOR_TOL * 1e-4 if tol is None else tol
        est = _adaptive(
            lambda n: (lambda v: (v, abs(v)))(_interior_eval(e, x, n, False)[0]),
            orders or _within_budget(SPHERE_ORDERS, lambda n: _sphere_count(e.dim, n), lambda n: _sphere_count(e.dim, n)),
            tol, "interior potential",
        )
    else:
        tol = EXTERIOR_TOL if tol is None else tol
        fn, default = _exterior_route(e, x)
        est = _adaptive(
            lambda n: (lambda v: (v, abs(v)))(fn(e, x, n, False)[0]),
            orders or default, tol, "exterior potential",
        )
    return est if full else est.value


def potential_gradient(e: Ellipsoid, x, tol=None, orders=None, full=False):
    """grad U_Omega(x) (the force field up to sign)."""
    _check_dim(e)
    x = _point(e, x)
    q = e.q_value(x)
    scale = _gradient_scale(e)
    if q <= BOUNDARY_EPS:
        tol = 1e-10 if tol is None else tol
        fn = lambda n: (_interior_eval(e, x, n, True)[1], scale)  # noqa: E731
        est = _adaptive(fn, orders or _within_budget(SPHERE_ORDERS, lambda n: _sphere_count(e.dim, n), lambda n: _sphere_count(e.dim, n)),
                        tol, "interior gradient")
    else:
        tol = EXTERIOR_TOL if tol is None else tol
        route, default = _exterior_route(e, x)
        fn = lambda n: (route(e, x, n, True)[1], scale)  # noqa: E731
        est = _adaptive(fn, orders or default, tol, "exterior gradient")
    return est if full else est.value


@lru_cache(maxsize=256)
def _gradient_scale(e):
    # |grad U| at the far vertex is of the order (N-2) * a_1 / N
    return max((e.dim - 2) * float(e.axes[0]) / e.dim, 1e-300)


@lru_cache(maxsize=256)
def central_potential(e: Ellipsoid) -> float:
    """B = U_Omega(0)."""
    return volume_potential(e, np.zeros(e.dim), tol=1e-9)


# -- interior quadratic form ---------------------------------------------------

@dataclass(frozen=True)
class QuadraticInterior:
    """U_Omega(x) = B - sum A_j x_j^2 inside the ellipsoid."""

    B: float
    A: np.ndarray
    residual: float

    @property
    def laplacian(self):
        return -2.0 * float(np.sum(self.A))

    def __call__(self, x):
        x = np.asarray(x, float)
        return self.B - float(np.sum(self.A * x * x))


def _fit_grid(e):
    ax = e.axes
    n = e.dim
    pts = []
    for j in range(n):
        for s in (-0.75, -0.5, -0.2, 0.3, 0.55, 0.8):
            p = np.zeros(n)
            p[j] = s * ax[j]
            pts.append(p)
    rng = np.random.default_rng(12345)
    for _ in range(4 * n):
        u = rng.normal(size=n)
        u /= np.linalg.norm(u)
        pts.append(u * ax * rng.uniform(0.1, 0.75))
    return np.array(pts)


def interior_quadratic(e: Ellipsoid, grid=None, max_residual=1e-5) -> QuadraticInterior:
    """B from U(0) and A_j by least squares of B - U(x) against x_j^2."""
    _check_dim(e)
    b = central_potential(e)
    grid = _fit_grid(e) if grid is None else np.asarray(grid, float)
    if any(e.q_value(p) >= 0 for p in grid):
        raise EllipstoneError("fit grid must lie strictly inside the ellipsoid")
    rhs = np.array([b - volume_potential(e, p, tol=1e-8) for p in grid])
    design = grid * grid
    coef, *_ = np.linalg.lstsq(design, rhs, rcond=None)
    residual = float(np.max(np.abs(design @ coef - rhs))) / abs(b)
    if residual > max_residual:
        raise FitResidualTooLarge(f"quadratic fit residual {residual:.3e}", estimate=coef)
    return QuadraticInterior(b, coef, residual)


# -- mother body ----------------------------------------------------------------

@dataclass(frozen=True)
class MotherBodyMeasure:
    """Measure on the focal ellipsoid with the exterior potential of the solid."""

    base: Ellipsoid

    @property
    def focal(self):
        return focal_ellipsoid(self.base)

    @property
    def prefactor(self):
        return 2.0 * float(np.prod(self.base.axes))

    def density(self, y):
        """Density w.r.t. Lebesgue measure dy' on {y_N = 0}; 0 off E."""
        y = np.atleast_2d(np.asarray(y, float))[:, : self.base.dim - 1]
        c2 = np.array([float(s) for s in self.focal.squares])
        inside = 1.0 - np.sum(y * y / c2, axis=1)
        pre = self.prefactor / math.sqrt(float(np.prod(c2)))
        out = pre * np.sqrt(np.clip(inside, 0.0, None))
        return out if out.size > 1 else float(out[0])

    def nodes(self, n):
        """Cubature nodes (points in R^N with y_N = 0) and weights of the measure."""
        eta, w = quad.semicircle_ball_rule(self.base.dim - 1, n)
        c = self.focal.semiaxes
        pts = np.zeros((len(w), self.base.dim))
        pts[:, :-1] = eta * c
        return pts, w * self.prefactor

    def total_mass(self, n=32):
        return float(np.sum(self.nodes(n)[1]))

    def integrate(self, f, n=64):
        """int f dmu for a vectorised f on (K, N) points."""
        pts, w = self.nodes(n)
        return np.asarray(f(pts)) @ w


def mother_body(e: Ellipsoid) -> MotherBodyMeasure:
    _check_dim(e)
    focal_ellipsoid(e)  # raises DegenerateFocal
    return MotherBodyMeasure(e)


def mother_body_density_ratio(e: Ellipsoid, lam, y):
    """Ratio of the mother-body densities of confocal(e, lam) and e at y on E."""
    from .geometry import confocal

    return mother_body(confocal(e, lam)).density(y) / mother_body(e).density(y)


def _on_focal(e, x, tol=1e-12):
    fe = focal_ellipsoid(e)
    return fe.contains(x, tol=tol)


def _mother_eval(e, x, n, with_grad):
    d = e.dim - 1
    dirs, wd = quad.sphere_rule(d, n)
    c = np.zeros(e.dim)
    c[:-1] = mother_body(e).focal.semiaxes
    lifted = np.zeros((len(wd), e.dim))
    lifted[:, :-1] = dirs
    weight = mother_body(e).prefactor * normalizer(e.dim)
    return _shell_sums(x, quad.semicircle_radial(d, n), lifted, wd, c, 0.0, weight, e.dim - 2, with_grad)


def _focal_orders(e):
    d = e.dim - 1
    return _within_budget(FOCAL_ORDERS, lambda n: _sphere_count(d, n) * n, lambda n: _sphere_count(d, n))


def mother_body_potential(e: Ellipsoid, x, tol=1e-10, allow_interior=False, full=False):
    """C_N int_E |x - y|^(2-N) dmu(y).

    Equals the volume potential for x outside the open ellipsoid.  With
    ``allow_interior`` the integral is also evaluated inside (off E), giving
    the harmonic continuation of the exterior potential.
    """
    _check_dim(e)
    x = _point(e, x)
    if not e.focal_nondegenerate:
        raise DegenerateFocal(f"{e!r} has no (N-1)-dimensional focal ellipsoid")
    if not allow_interior and e.q_value(x) < -BOUNDARY_EPS:
        raise PointNotExterior(f"{x.tolist()} lies inside the ellipsoid")
    if _on_focal(e, x):
        raise PathTouchesFocalSet(f"{x.tolist()} lies on the focal ellipsoid")
    est = _adaptive(
        lambda n: (lambda v: (v, abs(v)))(_mother_eval(e, x, n, False)[0]),
        _focal_orders(e), tol, "mother-body potential",
    )
    return est if full else est.value


def mother_body_field(e: Ellipsoid, x, tol=1e-10, allow_interior=False):
    """(mu_hat(x), grad mu_hat(x)) in one cubature pass."""
    _check_dim(e)
    x = _point(e, x)
    if not e.focal_nondegenerate:
        raise DegenerateFocal(f"{e!r} has no (N-1)-dimensional focal ellipsoid")
    if not allow_interior and e.q_value(x) < -BOUNDARY_EPS:
        raise PointNotExterior(f"{x.tolist()} lies inside the ellipsoid")
    if _on_focal(e, x):
        raise PathTouchesFocalSet(f"{x.tolist()} lies on the focal ellipsoid")

    def evaluate(n):
        v, g = _mother_eval(e, x, n, True)
        packed = np.concatenate([[v], g])
        return packed, max(abs(v), float(np.linalg.norm(g)) * float(np.linalg.norm(x)) / 2)

    est = _adaptive(evaluate, _focal_orders(e), tol, "mother-body field")
    return float(est.value[0]), np.array(est.value[1:])


# -- Newton's shell theorem ------------------------------------------------------

def shell_force(e: Ellipsoid, t, x, tol=1e-12, check_cavity=True):
    """grad U_{t Omega}(x) - grad U_Omega(x): the field of the shell t*Omega minus Omega.

    For x in the cavity (inside Omega) this is the gradient of the shell's
    potential.  ``check_cavity=False`` allows any point off both
    boundaries (negative controls).
    """
    _check_dim(e)
    x = _point(e, x)
    t = float(t)
    if t <= 1:
        raise EllipstoneError("shell factor t must exceed 1")
    big = e.scaled(t)
    if e.q_value(x) >= 0:
        if check_cavity:
            raise PointNotInCavity(f"{x.tolist()} is not inside the cavity")
        return potential_gradient(big, x) - potential_gradient(e, x)
    scale = _gradient_scale(e)
    cn = normalizer(e.dim) * (e.dim - 2)

    def evaluate(n):
        dirs, w = quad.sphere_rule(e.dim, n)
        diff = ray_lengths(big, x, dirs) - ray_lengths(e, x, dirs)
        return cn * ((w * diff) @ dirs), scale

    orders = _within_budget(SPHERE_ORDERS, lambda n: _sphere_count(e.dim, n), lambda n: _sphere_count(e.dim, n))
    return _adaptive(evaluate, orders, tol, "shell force").value


def force_scale(e: Ellipsoid) -> float:
    """max |grad U_Omega| over the boundary, 2 max_j A_j a_j."""
    quadf = interior_quadratic(e)
    return float(2.0 * np.max(quadf.A * e.axes))


# -- equilibrium potential, Ivory, capacity ------------------------------------

def equilibrium_potential(e: Ellipsoid, x, tol=1e-8):
    """V(x) = (mu_hat - x . grad mu_hat / 2) / B for x outside or on the ellipsoid.

    mu_hat is the mother-body potential; when the focal set is degenerate
    (a_(N-1) = a_N) the exterior volume potential is used instead.
    """
    _check_dim(e)
    x = _point(e, x)
    if e.q_value(x) < -1e-12:
        raise PointNotExterior(f"{x.tolist()} lies inside the ellipsoid")
    if e.focal_nondegenerate:
        mu, g = mother_body_field(e, x, tol=tol)
    else:
        # no (N-1)-dimensional E: the exterior volume potential is mu_hat itself
        mu = volume_potential(e, x, tol=tol)
        g = potential_gradient(e, x, tol=tol)
    return (mu - 0.5 * float(x @ g)) / central_potential(e)


@dataclass(frozen=True)
class Capacity:
    value: float
    radii: tuple
    samples: tuple
    table: tuple
    closed_form: float
    converged: bool

    def to_dict(self):
        return {
            "value": self.value,
            "radii": list(self.radii),
            "samples": list(self.samples),
            "extrapolation_table": [list(r) for r in self.table],
            "asymptotic_closed_form": self.closed_form,
            "converged": self.converged,
        }


def capacity(e: Ellipsoid, direction=None, factors=(8, 16, 32, 64), tol=1e-8) -> Capacity:
    """lim |x|^(N-2) V(x) by Richardson extrapolation in 1/|x|^2 along a ray."""
    _check_dim(e)
    n = e.dim
    d = np.ones(n) if direction is None else np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    a1 = float(e.axes[0])
    radii = [f * a1 for f in factors]
    g = [r ** (n - 2) * equilibrium_potential(e, r * d) for r in radii]
    h = [1.0 / r**2 for r in radii]
    # Neville table towards h = 0
    table = [list(g)]
    for k in range(1, len(g)):
        prev = table[-1]
        row = []
        for i in range(len(prev) - 1):
            row.append((h[i] * prev[i + 1] - h[i + k] * prev[i]) / (h[i] - h[i + k]))
        table.append(row)
    value = table[-1][0]
    spread = abs(table[-1][0] - table[-2][-1]) if len(table) > 1 else math.inf
    closed = n * volume(e) * normalizer(n) / (2.0 * central_potential(e))
    return Capacity(value, tuple(radii), tuple(g), tuple(tuple(r) for r in table), closed,
                    spread <= tol * abs(value))


def laplacian_fd(f, x, h):
    """Second-difference Laplacian (2N+1 point stencil) with step h."""
    x = np.asarray(x, float)
    f0 = f(x)
    total = 0.0
    for j in range(len(x)):
        step = np.zeros_like(x)
        step[j] = h
        total += f(x + step) - 2 * f0 + f(x - step)
    return total / (h * h)


# -- analytic continuation across the boundary ---------------------------------

def _crossings(e, path):
    out = []
    for p0, p1 in zip(path[:-1], path[1:]):
        q0, q1 = e.q_value(p0), e.q_value(p1)
        if q0 == 0 or q1 == 0 or (q0 > 0) == (q1 > 0):
            continue
        lo, hi = (p0, p1) if q0 < 0 else (p1, p0)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if e.q_value(mid) < 0:
                lo = mid
            else:
                hi = mid
            if np.max(np.abs(hi - lo)) < 1e-15:
                break
        # project radially onto the boundary
        mid = 0.5 * (lo + hi)
        mid = mid / math.sqrt(e.q_value(mid) + 1.0)
        out.append(mid)
    return out


def analytic_continuation_check(e: Ellipsoid, path, tol=1e-5, on_focal="raise", strict_interior=False):
    """Check that the mother-body integral continues U_Omega smoothly across Gamma.

    Along `path`: outside and on Gamma the mother-body integral must equal
    U_Omega; inside (off E) it must stay finite, and at every crossing of
    Gamma value and gradient of U_Omega and the continuation must agree (the
    difference M = U_Omega - mu_hat vanishes to first order on Gamma).
    ``strict_interior`` also demands equality inside, which must fail
    (negative control).
    """
    _check_dim(e)
    path = [np.asarray(p, float) for p in path]
    if on_focal not in ("raise", "exclude"):
        raise ValueError("on_focal must be 'raise' or 'exclude'")
    samples = []
    for p in path:
        if _on_focal(e, p, tol=1e-9):
            if on_focal == "raise":
                raise PathTouchesFocalSet(f"path point {p.tolist()} lies on E")
            samples.append({"input": p.tolist(), "region": "focal", "singular": True,
                            "value": None, "reference": None, "abs_err": 0.0, "rel_err": 0.0})
            continue
        mu = mother_body_potential(e, p, allow_interior=True, tol=1e-9)
        u = volume_potential(e, p)
        q = e.q_value(p)
        region = "interior" if q < -BOUNDARY_EPS else ("boundary" if q <= BOUNDARY_EPS else "exterior")
        s = rel_sample(p.tolist(), mu, u)
        s["region"] = region
        if region == "interior" and not strict_interior:
            s["M"] = u - mu
            s["rel_err"] = 0.0 if math.isfinite(mu) else math.inf
        samples.append(s)
    for c in _crossings(e, path):
        mu, gmu = mother_body_field(e, c, tol=1e-10)
        u = volume_potential(e, c)
        gu = potential_gradient(e, c)
        s = rel_sample(c.tolist(), mu, u)
        s["region"] = "crossing"
        samples.append(s)
        gerr = float(np.linalg.norm(gmu - gu))
        gs = {"input": c.tolist(), "region": "crossing-gradient", "value": gmu.tolist(),
              "reference": gu.tolist(), "abs_err": gerr,
              "rel_err": gerr / max(float(np.linalg.norm(gu)), 1e-300)}
        samples.append(gs)
    return VerificationReport.from_samples(
        "continuation", {"ellipsoid": e.to_json(), "points": len(path), "strict_interior": strict_interior},
        samples, tol
    )


# -- sample points and report-producing checks ---------------------------------

def boundary_points(e: Ellipsoid, k, rng):
    """k points on the boundary of e, uniform direction in the unit-ball picture."""
    u = rng.normal(size=(k, e.dim))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return u * e.axes


def exterior_points(e: Ellipsoid, k, rng, factors=(1.1, 3.0)):
    """k points on homothetic copies s*Gamma with s uniform in `factors`."""
    s = rng.uniform(*factors, size=(k, 1))
    return boundary_points(e, k, rng) * s


def cavity_points(e: Ellipsoid, k, rng, depth=0.95):
    """k points strictly inside e."""
    s = rng.uniform(0.0, depth, size=(k, 1))
    return boundary_points(e, k, rng) * s


def mother_body_check(e: Ellipsoid, points, tol=1e-6, allow_interior=False, threads=None):
    """Mother-body potential against the volume potential at exterior points.

    ``allow_interior`` permits points inside the ellipsoid, where the two
    differ (negative control).
    """
    def one(x):
        mu = mother_body_potential(e, x, allow_interior=allow_interior)
        return rel_sample(list(map(float, x)), mu, volume_potential(e, x))

    samples = pmap(one, points, threads)
    mass = mother_body(e).total_mass()
    vol = volume(e)
    mass_sample = rel_sample("total mass", mass, vol)
    extra = {"total_mass": mass, "volume": vol, "mass_rel_err": mass_sample["rel_err"]}
    return VerificationReport.from_samples(
        "motherbody", {"ellipsoid": e.to_json(), "points": len(samples)}, samples + [mass_sample], tol,
        extra=extra,
    )


def newton_check(e: Ellipsoid, t, points, tol=1e-6, check_cavity=True, threads=None):
    """|shell force| relative to the boundary force scale at the given points."""
    scale = force_scale(e)

    def one(x):
        f = shell_force(e, t, x, check_cavity=check_cavity)
        mag = float(np.linalg.norm(f))
        return {"input": list(map(float, x)), "value": f.tolist(), "reference": 0.0,
                "abs_err": mag, "rel_err": mag / scale}

    samples = pmap(one, points, threads)
    return VerificationReport.from_samples(
        "newton", {"ellipsoid": e.to_json(), "t": float(t), "points": len(samples)}, samples, tol,
        extra={"force_scale": scale},
    )


def equilibrium_check(e: Ellipsoid, points, tol=1e-5, threads=None):
    """V = 1 at the given points (points of Gamma for the positive check)."""
    samples = pmap(lambda x: rel_sample(list(map(float, x)), equilibrium_potential(e, x), 1.0), points, threads)
    return VerificationReport.from_samples(
        "equilibrium", {"ellipsoid": e.to_json(), "points": len(samples)}, samples, tol
    )


def ivory_check(e: Ellipsoid, lambdas, k, rng, tol=1e-5, homothetic=False, threads=None):
    """V is constant (< 1) on each confocal surface Gamma_lambda, lambda > 0.

    With ``homothetic=True`` the surfaces are the homothetic copies with the
    same volume instead, on which V is not constant (negative control).
    """
    from .geometry import confocal

    samples = []
    levels = {}
    for lam in lambdas:
        surf = confocal(e, lam)
        if homothetic:
            surf = e.scaled(float(np.prod(surf.axes) / np.prod(e.axes)) ** (1.0 / e.dim))
        pts = boundary_points(surf, k, rng)
        vals = np.array(pmap(lambda x: equilibrium_potential(e, x), pts, threads))
        mean = float(np.mean(vals))
        spread = float(np.max(vals) - np.min(vals)) / abs(mean)
        levels[str(lam)] = mean
        samples.append({"input": float(lam), "value": mean, "reference": None,
                        "abs_err": float(np.max(vals) - np.min(vals)), "rel_err": spread,
                        "below_one": bool(np.max(vals) < 1.0)})
        if not np.max(vals) < 1.0:
            samples[-1]["rel_err"] = math.inf
    return VerificationReport.from_samples(
        "ivory", {"ellipsoid": e.to_json(), "lambdas": [float(v) for v in lambdas], "points": k,
                  "homothetic": homothetic},
        samples, tol, extra={"levels": levels},
    )


def kernel_maclaurin_check(e: Ellipsoid, x, lambdas, tol=1e-6):
    """(prod a_j / prod sqrt(a_j^2 + lam)) * U_{Omega_lam}(x) is independent of lam
    while x stays outside Omega_lam."""
    from .geometry import confocal

    x = _point(e, x)
    vals = []
    for lam in lambdas:
        el = confocal(e, lam)
        if el.q_value(x) <= 0:
            raise PointNotExterior(f"{x.tolist()} is not outside the confocal member lambda={lam}")
        ratio = float(np.prod(e.axes) / np.prod(el.axes))
        vals.append(ratio * volume_potential(el, x))
    ref = vals[0]
    samples = [rel_sample(float(lam), v, ref) for lam, v in zip(lambdas, vals)]
    return VerificationReport.from_samples(
        "kernel-maclaurin", {"ellipsoid": e.to_json(), "x": x.tolist()}, samples, tol
    )
