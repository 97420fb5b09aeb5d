"""Tensor-product cubature rules on spheres, balls and the focal ellipsoid.

All rules are built from Gauss-Jacobi nodes so that the Jacobian weights of
hyperspherical coordinates (and the square-root edge behaviour of the
mother-body density) are integrated exactly rather than resolved.  Rules are
cached and returned as read-only arrays.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi


def _frozen(*arrays):
    for a in arrays:
        a.setflags(write=False)
    return arrays if len(arrays) > 1 else arrays[0]


@lru_cache(maxsize=256)
def gauss_jacobi(n, alpha, beta):
    """Nodes/weights on [-1, 1] for the weight (1-s)^alpha (1+s)^beta."""
    if alpha == 0 and beta == 0:
        x, w = np.polynomial.legendre.leggauss(n)
    else:
        x, w = roots_jacobi(n, alpha, beta)
    return _frozen(np.asarray(x, float), np.asarray(w, float))


@lru_cache(maxsize=128)
def sphere_rule(d, n):
    """Directions and weights on S^{d-1} (weights sum to its area).

    n nodes per polar angle, 2n equispaced azimuths.
    """
    if d == 1:
        return _frozen(np.array([[1.0], [-1.0]]), np.array([1.0, 1.0]))
    if d == 2:
        m = 2 * n
        phi = 2 * np.pi * np.arange(m) / m
        pts = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        return _frozen(pts, np.full(m, 2 * np.pi / m))
    g = (d - 3) / 2
    t, wt = gauss_jacobi(n, g, g)
    sub, wsub = sphere_rule(d - 1, n)
    st = np.sqrt(1.0 - t * t)
    pts = np.empty((n, len(wsub), d))
    pts[:, :, 0] = t[:, None]
    pts[:, :, 1:] = st[:, None, None] * sub[None, :, :]
    w = (wt[:, None] * wsub[None, :]).ravel()
    return _frozen(pts.reshape(-1, d), w)


@lru_cache(maxsize=64)
def hemisphere_rule(d, n):
    """Directions with first coordinate <= 0 on S^{d-1} (d >= 2)."""
    if d == 2:
        # half circle: angle in [pi/2, 3pi/2], Gauss-Legendre
        s, ws = gauss_jacobi(2 * n, 0, 0)
        phi = np.pi + s * np.pi / 2
        pts = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        return _frozen(pts, ws * np.pi / 2)
    g = (d - 3) / 2
    s, ws = gauss_jacobi(n, 0, g)
    t = (s - 1) / 2  # t in [-1, 0]; (1+t)^g absorbed by the rule
    wt = ws * 2.0 ** (-g) / 2 * (1 - t) ** g
    sub, wsub = sphere_rule(d - 1, n)
    st = np.sqrt(1.0 - t * t)
    pts = np.empty((n, len(wsub), d))
    pts[:, :, 0] = t[:, None]
    pts[:, :, 1:] = st[:, None, None] * sub[None, :, :]
    w = (wt[:, None] * wsub[None, :]).ravel()
    return _frozen(pts.reshape(-1, d), w)


@lru_cache(maxsize=32)
def graded_hemisphere_rule(d, n, k):
    """hemisphere_rule with the polar variable t = first coordinate graded
    towards t = 0 in panels growing by 4 from 2^-k (d >= 3).

    Resolves integrands with a feature of width ~2^-k near the rim.
    """
    if k <= 1 or d < 3:
        return hemisphere_rule(d, n)
    g = (d - 3) / 2
    breaks = [0.0]
    b = 2.0 ** (-k)
    while b < 0.25:
        breaks.append(b)
        b *= 4.0
    x, w = gauss_jacobi(n, 0, 0)
    ts, wts = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        t = -(lo + (hi - lo) * (x + 1) / 2)
        ts.append(t)
        wts.append(w * (hi - lo) / 2 * (1 - t * t) ** g)
    # last panel [-1, -b] carries the (1+t)^g end behaviour exactly
    last = breaks[-1]
    s, ws = gauss_jacobi(n, 0, g)
    t = -1 + (1 - last) * (s + 1) / 2
    ts.append(t)
    wts.append(ws * ((1 - last) / 2) ** (g + 1) * (1 - t) ** g)
    t, wt = np.concatenate(ts), np.concatenate(wts)
    sub, wsub = sphere_rule(d - 1, n)
    st = np.sqrt(1.0 - t * t)
    pts = np.empty((len(t), len(wsub), d))
    pts[:, :, 0] = t[:, None]
    pts[:, :, 1:] = st[:, None, None] * sub[None, :, :]
    w = (wt[:, None] * wsub[None, :]).ravel()
    return _frozen(pts.reshape(-1, d), w)


@lru_cache(maxsize=64)
def ball_radial(d, n):
    """Radial nodes in [0, 1] and weights for r^(d-1) dr."""
    s, ws = gauss_jacobi(n, 0, d - 1)
    return _frozen((s + 1) / 2, ws / 2**d)


@lru_cache(maxsize=64)
def semicircle_radial(d, n):
    """Radial nodes in [0, 1] and weights for sqrt(1 - r^2) r^(d-1) dr."""
    s, ws = gauss_jacobi(n, 0.5, d - 1)
    r = (s + 1) / 2
    # (1-r)^(1/2) r^(d-1) dr from the rule; (1+r)^(1/2) stays in the weight
    return _frozen(r, ws * 2.0 ** (-0.5) * 2.0 ** (-(d - 1)) / 2 * np.sqrt(1 + r))


def _product(radial, d, n):
    r, wr = radial
    dirs, wd = sphere_rule(d, n)
    pts = (r[:, None, None] * dirs[None, :, :]).reshape(-1, d)
    w = (wr[:, None] * wd[None, :]).ravel()
    return _frozen(pts, w)


@lru_cache(maxsize=12)
def ball_rule(d, n):
    """Points and weights on the unit ball of R^d (weights sum to its volume)."""
    return _product(ball_radial(d, n), d, n)


@lru_cache(maxsize=12)
def semicircle_ball_rule(d, n):
    """Unit ball of R^d with weight sqrt(1 - |eta|^2)."""
    return _product(semicircle_radial(d, n), d, n)


def rotation_to(normal):
    """Orthogonal matrix whose first column is the unit vector `normal`."""
    normal = np.asarray(normal, float)
    normal = normal / np.linalg.norm(normal)
    d = len(normal)
    mat = np.eye(d)
    k = int(np.argmin(np.abs(normal)))
    mat = np.column_stack([normal] + [mat[:, j] for j in range(d) if j != k])
    q, _ = np.linalg.qr(mat)
    if q[:, 0] @ normal < 0:
        q[:, 0] = -q[:, 0]
    return q
