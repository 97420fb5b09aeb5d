"""Bergman orthogonal polynomials of planar domains and their recurrences.

For an axis-aligned ellipse the area moments

    M[j][k] = int z^j conj(z)^k dA

are pi*a*b times a rational number when a and b are rational, because
z^j conj(z)^k expands into real monomials x^p y^q whose ellipse means are
rational in a^2, b^2 (see `moments.ball_mean`).  Reflection in the real axis
makes M real symmetric.  Orthogonalization is done in exact arithmetic by an
LDL^T factorization of the scaled moment matrix, which side-steps the
exponential ill-conditioning of the monomial Gram matrix; the common pi*a*b
factor cancels from the recurrence coefficients

    a[l][m] = <z p_m, p_l> = N[l][m] / sqrt(D_l D_m).

Domains without closed-form moments (the quartic negative control) get
floating moments from the periodic trapezoid rule in polar form; those
floats are then orthogonalized exactly, so the only error is in the moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import EllipstoneError, NumericallySingular
from .moments import ball_mean
from .report import VerificationReport


def _frac(x):
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


@dataclass(frozen=True)
class MomentMatrix:
    """Moments M[j][k] = scale * S[j][k] for 0 <= j, k <= size - 1.

    `exact` holds the Fractions S when available, `values` the float moments.
    """

    values: np.ndarray
    scale: float
    exact: tuple | None
    domain: dict

    @property
    def size(self):
        return self.values.shape[0]

    @property
    def scaled(self):
        """Entries S as Fractions (exact, or the exact values of the float moments)."""
        if self.exact is not None:
            return self.exact
        s = self.values / self.scale
        return tuple(tuple(Fraction(float(v)) for v in row) for row in s)


def _real_moment_ellipse(p, q, a2, b2):
    """mean of x^p y^q over the ellipse with squared semiaxes a2, b2."""
    m = ball_mean((p, q), 2)
    if not m:
        return Fraction(0)
    return m * a2 ** (p // 2) * b2 ** (q // 2)


def _scaled_ellipse_moment(j, k, a2, b2):
    """int z^j conj(z)^k dA / (pi a b), exact.

    z^j = sum C(j,s) x^(j-s) (iy)^s and conj(z)^k = sum C(k,t) x^(k-t) (-iy)^t.
    """
    total = Fraction(0)
    for s in range(j + 1):
        for t in range(k + 1):
            q = s + t
            if q & 1:
                continue
            p = j + k - q
            if p & 1:
                continue
            # i^s (-i)^t = i^(s+t) (-1)^t, real because s+t is even
            sign = (-1) ** (q // 2) * (-1) ** t
            total += sign * comb(j, s) * comb(k, t) * _real_moment_ellipse(p, q, a2, b2)
    return total


def area_moments(a, b, max_degree) -> MomentMatrix:
    """Moments of the ellipse x^2/a^2 + y^2/b^2 <= 1 up to index max_degree + 1.

    One extra index is kept so that <z p_m, p_l> is available for m = max_degree.
    """
    a, b = _frac(a), _frac(b)
    if not a >= b > 0:
        raise EllipstoneError("need a >= b > 0")
    if max_degree < 0:
        raise EllipstoneError("max_degree must be non-negative")
    n = max_degree + 2
    a2, b2 = a * a, b * b
    exact = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        for k in range(j, n):
            v = _scaled_ellipse_moment(j, k, a2, b2)
            exact[j][k] = exact[k][j] = v
    scale = math.pi * float(a) * float(b)
    values = np.array([[float(v) for v in row] for row in exact]) * scale
    return MomentMatrix(values, scale, tuple(tuple(r) for r in exact),
                        {"kind": "ellipse", "a": str(a), "b": str(b)})


def ellipse_radius(a, b):
    a, b = float(a), float(b)
    return lambda th: 1.0 / np.sqrt(np.cos(th) ** 2 / a**2 + np.sin(th) ** 2 / b**2)


def quartic_radius(a=2.0, b=1.0, eps=0.015):
    """Star domain (cos^2/a^2 + sin^2/b^2) r^2 - eps r^4 = 1 (smaller root in r^2)."""
    a, b, eps = float(a), float(b), float(eps)

    def radius(th):
        c = np.cos(th) ** 2 / a**2 + np.sin(th) ** 2 / b**2
        if eps == 0:
            return 1.0 / np.sqrt(c)
        disc = c * c - 4.0 * eps
        if np.any(disc <= 0):
            raise EllipstoneError("quartic perturbation too large: boundary not star-shaped")
        # r^2 = (c - sqrt(disc)) / (2 eps) written without cancellation
        return np.sqrt(2.0 / (c + np.sqrt(disc)))

    return radius


def polar_domain_moments(radius, max_degree, tol=1e-15, max_points=1 << 16, domain=None) -> MomentMatrix:
    """Moments of {r < radius(theta)} by the periodic trapezoid rule, doubled until settled.

    M[j][k] = int e^{i(j-k) th} R^(j+k+2) / (j+k+2) d th.  Only domains
    symmetric under y -> -y are supported (moments real).
    """
    n = max_degree + 2
    jj, kk = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    power = jj + kk + 2

    def evaluate(points):
        th = 2 * np.pi * np.arange(points) / points
        r = radius(th)
        logr = np.log(r)
        out = np.empty((n, n))
        for d in range(-(n - 1), n):
            mask = (jj - kk) == d
            p = power[mask]
            vals = np.exp(np.outer(p, logr)) * np.cos(d * th)[None, :]
            out[mask] = vals.sum(axis=1) * (2 * np.pi / points) / p
        return out

    points = 64
    prev = evaluate(points)
    while True:
        points *= 2
        cur = evaluate(points)
        if np.max(np.abs(cur - prev) / np.maximum(np.abs(cur), 1e-300)) <= tol or points >= max_points:
            break
        prev = cur
    area = cur[0, 0]
    return MomentMatrix(cur, float(area), None, domain or {"kind": "polar", "points": points})


def quartic_domain_moments(max_degree, a=2.0, b=1.0, eps=0.015) -> MomentMatrix:
    """Negative-control domain: an ellipse perturbed by a quartic term."""
    return polar_domain_moments(
        quartic_radius(a, b, eps), max_degree,
        domain={"kind": "quartic", "a": float(a), "b": float(b), "eps": float(eps)},
    )


# -- exact orthogonalization ---------------------------------------------------

def ldl_exact(matrix):
    """M = L D L^T for a symmetric positive definite Fraction matrix.

    Returns (L, D) with L unit lower triangular (list of rows) and D the pivots.
    """
    n = len(matrix)
    L = [[Fraction(0)] * n for _ in range(n)]
    D = [Fraction(0)] * n
    for j in range(n):
        s = matrix[j][j] - sum(L[j][k] * L[j][k] * D[k] for k in range(j))
        if s <= 0:
            raise NumericallySingular(
                f"moment matrix is not positive definite at index {j}", condition=math.inf
            )
        D[j] = s
        L[j][j] = Fraction(1)
        for i in range(j + 1, n):
            L[i][j] = (matrix[i][j] - sum(L[i][k] * L[j][k] * D[k] for k in range(j))) / s
    return L, D


def _unit_lower_inverse(L):
    n = len(L)
    inv = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        inv[i][i] = Fraction(1)
        for j in range(i):
            inv[i][j] = -sum(L[i][k] * inv[k][j] for k in range(j, i))
    return inv


@dataclass(frozen=True)
class BergmanBasis:
    """Orthonormal polynomials p_0..p_M.

    `monic[m]` holds the exact coefficients (constant term first) of the
    monic orthogonal polynomial P_m, whose squared norm is scale * norms[m];
    p_m = P_m / sqrt(scale * norms[m]).
    """

    monic: tuple
    norms: tuple
    scale: float

    @property
    def degree(self):
        return len(self.monic) - 1

    @property
    def coefficients(self):
        """Float coefficient matrix C with p_m = sum_k C[m][k] z^k."""
        n = len(self.monic)
        c = np.zeros((n, n))
        for m, row in enumerate(self.monic):
            s = math.sqrt(self.scale * float(self.norms[m]))
            for k, v in enumerate(row):
                c[m, k] = float(v) / s
        return c

    def leading(self):
        return np.array([1.0 / math.sqrt(self.scale * float(d)) for d in self.norms])


def orthonormalize(M: MomentMatrix, degree=None) -> BergmanBasis:
    """Orthonormalize 1, z, ..., z^degree against the moments (exact LDL^T)."""
    degree = M.size - 2 if degree is None else degree
    if degree > M.size - 1:
        raise EllipstoneError("not enough moments for the requested degree")
    S = M.scaled
    sub = [list(S[i][: degree + 1]) for i in range(degree + 1)]
    L, D = ldl_exact(sub)
    inv = _unit_lower_inverse(L)
    monic = tuple(tuple(inv[m][: m + 1]) for m in range(degree + 1))
    return BergmanBasis(monic, tuple(D), M.scale)


def gram_residual(B: BergmanBasis, M: MomentMatrix, exact=True):
    """max |<p_i, p_j> - delta_ij|, recomputed from the moments.

    With ``exact=True`` the Gram matrix of the monic polynomials is
    recomputed in rational arithmetic and normalized by the stored norms;
    otherwise the float coefficients and float moments are used (which
    exposes the conditioning of the monomial basis).
    """
    n = B.degree + 1
    if exact:
        S = M.scaled
        worst = 0.0
        for i in range(n):
            for j in range(i + 1):
                g = sum(B.monic[i][p] * B.monic[j][q] * S[p][q]
                        for p in range(i + 1) for q in range(j + 1))
                target = B.norms[i] if i == j else 0
                if g != target:
                    dev = abs(float(g) / math.sqrt(float(B.norms[i]) * float(B.norms[j])) - (i == j))
                    worst = max(worst, dev if dev > 0 else math.ulp(1.0))
        return worst
    C = B.coefficients
    G = C @ M.values[:n, :n] @ C.T
    return float(np.max(np.abs(G - np.eye(n))))


def recurrence_matrix(B: BergmanBasis, M: MomentMatrix):
    """a[l][m] = <z p_m, p_l> for 0 <= l <= m + 1 <= degree + 1 (other entries 0).

    Shape (degree + 2, degree + 1); column m holds the expansion of z p_m.
    The top row index degree + 1 needs p_{degree+1}, so the basis is
    extended by one step internally.
    """
    S = M.scaled
    deg = B.degree
    if M.size < deg + 2:
        raise EllipstoneError("moment matrix too small for the recurrence table")
    ext = orthonormalize(M, deg + 1) if M.size >= deg + 2 else B
    monic, norms = ext.monic, ext.norms
    a = np.zeros((deg + 2, deg + 1))
    for m in range(deg + 1):
        for l in range(m + 2):
            num = Fraction(0)
            for i, ci in enumerate(monic[m]):
                if not ci:
                    continue
                row = S[i + 1]
                for k, ck in enumerate(monic[l]):
                    if ck:
                        num += ci * ck * row[k]
            if num:
                a[l, m] = float(num) / math.sqrt(float(norms[m]) * float(norms[l]))
    return a


@dataclass(frozen=True)
class Bandwidth:
    value: int
    offband: tuple  # per m: max |a[l][m]| over l < m - value + 1 (the entries that must vanish)
    columns: tuple  # per m: |a[l][m]| for l = 0..m+1

    def to_dict(self):
        return {"bandwidth": self.value, "offband_max": list(self.offband),
                "columns": [list(c) for c in self.columns]}


def recurrence_bandwidth(a, tol) -> Bandwidth:
    """Smallest N >= 1 with |a[l][m]| <= tol for every l < m - N + 1."""
    if tol <= 0:
        raise EllipstoneError("tol must be positive")
    a = np.asarray(a)
    ncols = a.shape[1]
    n = 1
    for m in range(ncols):
        for l in range(m + 1):
            if abs(a[l, m]) > tol:
                n = max(n, m - l + 1)
    offband, columns = [], []
    for m in range(ncols):
        lo = m - n + 1
        off = float(np.max(np.abs(a[:lo, m]))) if lo > 0 else 0.0
        offband.append(off)
        columns.append(tuple(float(abs(v)) for v in a[: m + 2, m]))
    return Bandwidth(n, tuple(offband), tuple(columns))


def bandwidth_sweep(moments_for, degrees, tol):
    """Bandwidth as a function of the maximal degree; stable iff constant."""
    out = []
    for d in degrees:
        M = moments_for(d)
        B = orthonormalize(M, d)
        out.append(recurrence_bandwidth(recurrence_matrix(B, M), tol).value)
    return out


def disk_coefficient(m):
    """Subdiagonal recurrence coefficient of the disk, sqrt((m+1)/(m+2))."""
    return math.sqrt((m + 1) / (m + 2))


def bergman_check(a, b, max_degree, tol=1e-10, negative_control=False, sweep=None):
    """Recurrence report for an ellipse (or the quartic control domain).

    Passes when the bandwidth is the same for every maximal degree in the
    sweep and off-band entries are below `tol`.  For the negative control
    the bandwidth is expected to keep growing, and the report then fails.
    """
    if negative_control:
        moments_for = lambda d: quartic_domain_moments(d, a, b)  # noqa: E731
    else:
        moments_for = lambda d: area_moments(a, b, d)  # noqa: E731
    M = moments_for(max_degree)
    B = orthonormalize(M, max_degree)
    table = recurrence_matrix(B, M)
    bw = recurrence_bandwidth(table, tol)
    sweep = list(sweep or range(max(2, max_degree - 6), max_degree + 1))
    widths = bandwidth_sweep(moments_for, sweep, tol)
    stable = len(set(widths)) == 1
    samples = []
    for m, off in enumerate(bw.offband):
        # recurrence coefficients are O(1), so off-band magnitudes are used directly
        samples.append({"input": m, "value": off, "reference": 0.0, "abs_err": off, "rel_err": off})
    samples.append({"input": "bandwidth sweep", "value": widths, "reference": widths[-1],
                    "abs_err": 0.0 if stable else 1.0, "rel_err": 0.0 if stable else math.inf})
    rep = VerificationReport.from_samples(
        "bergman",
        {"a": str(a), "b": str(b), "max_degree": max_degree, "tol": tol,
         "domain": M.domain, "negative_control": negative_control},
        samples, tol,
        extra={"bandwidth": bw.value, "expected_bandwidth": 2 if a != b else 1,
               "sweep_degrees": sweep, "sweep_bandwidths": widths,
               "gram_residual": gram_residual(B, M)},
    )
    rep.extra["table"] = table.tolist()
    return rep
