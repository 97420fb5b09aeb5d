"""Exact polynomial solution of the Dirichlet problem on an ellipsoid.

With q the defining quadratic of the ellipsoid, the operator
``T(r) = laplacian(q * r)`` maps P_{m-2} onto itself and is injective, so
for polynomial data p of degree m there is a unique r in P_{m-2} with
``T(r) = laplacian(p)``; then ``u = p - q*r`` is harmonic and equals p on
the boundary.

Writing q = Q - 1 with Q the homogeneous quadratic part, the degree-k
component of T(r) is ``laplacian(Q * r_k) - laplacian(r_{k+2})``.  T is
therefore block upper triangular with respect to the homogeneous
decomposition, and each diagonal block ``r_k -> laplacian(Q * r_k)``
further splits by the parity pattern of the exponents (alpha mod 2), since
both multiplication by x_j^2 and d^2/dx_j^2 preserve it.  The solver works
block by block, top degree first, with fraction-free elimination on each
block.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from .geometry import Ellipsoid, defining_quadratic
from .polyalg import RATIONAL, MultiPoly, exponents_of_degree, exponents_up_to, harmonic_projection
from .report import VerificationReport


# -- exact linear algebra ----------------------------------------------------

def _lcm_denominators(values):
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out


def bareiss_determinant(matrix):
    """Exact determinant of a square matrix of ints/Fractions."""
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    scale = _lcm_denominators(v for row in matrix for v in row)
    a = [[int(Fraction(v) * scale) for v in row] for row in matrix]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return Fraction(sign * a[n - 1][n - 1], scale**n)


def bareiss_solve(matrix, rhs):
    """Solve matrix @ x = rhs exactly by fraction-free elimination.

    `matrix` is a list of rows, `rhs` a list; entries ints or Fractions.
    Raises ZeroDivisionError if the matrix is singular.
    """
    n = len(matrix)
    if n == 0:
        return []
    # clear denominators row by row so all arithmetic is on integers
    aug = []
    for row, b in zip(matrix, rhs):
        s = _lcm_denominators(list(row) + [b])
        aug.append([int(Fraction(v) * s) for v in row] + [int(Fraction(b) * s)])
    prev = 1
    for k in range(n):
        if aug[k][k] == 0:
            for i in range(k + 1, n):
                if aug[i][k] != 0:
                    aug[k], aug[i] = aug[i], aug[k]
                    break
            else:
                raise ZeroDivisionError("singular system")
        akk = aug[k][k]
        row_k = aug[k]
        for i in range(k + 1, n):
            row_i = aug[i]
            aik = row_i[k]
            for j in range(k + 1, n + 1):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    # back substitution on the fraction-free upper triangular form
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = Fraction(aug[i][n])
        for j in range(i + 1, n):
            if aug[i][j]:
                s -= aug[i][j] * x[j]
        x[i] = s / aug[i][i]
    return x


# -- the operator T -----------------------------------------------------------

def _inv_squares(e):
    if not e.exact:
        raise TypeError("exact solve needs rational squared semiaxes")
    return [Fraction(1) / s for s in e.squares]


def _t_column(beta, inv_sq):
    """laplacian(q * x^beta) as a dict, q = sum x_j^2/a_j^2 - 1."""
    out = {}
    n = len(beta)

    def add(alpha, c):
        v = out.get(alpha, 0) + c
        if v:
            out[alpha] = v
        else:
            out.pop(alpha, None)

    # laplacian(Q x^beta): Q x^beta = sum_j c_j x^{beta + 2 e_j}
    for j in range(n):
        g = list(beta)
        g[j] += 2
        for i in range(n):
            e = g[i]
            if e >= 2:
                h = list(g)
                h[i] -= 2
                add(tuple(h), inv_sq[j] * e * (e - 1))
    # - laplacian(x^beta)
    for i in range(n):
        e = beta[i]
        if e >= 2:
            h = list(beta)
            h[i] -= 2
            add(tuple(h), -e * (e - 1))
    return out


@dataclass(frozen=True)
class FischerSystem:
    """Matrix of r -> laplacian(q r) on P_{m-2}, graded-lex ascending basis."""

    degree: int
    basis: tuple
    matrix: tuple

    @property
    def size(self):
        return len(self.basis)

    def determinant(self):
        return bareiss_determinant([list(r) for r in self.matrix])


def build_fischer_system(e: Ellipsoid, m: int) -> FischerSystem:
    if m < 2:
        raise ValueError("m must be >= 2")
    inv_sq = _inv_squares(e)
    basis = tuple(exponents_up_to(e.dim, m - 2))
    index = {b: i for i, b in enumerate(basis)}
    size = len(basis)
    rows = [[Fraction(0)] * size for _ in range(size)]
    for j, beta in enumerate(basis):
        for alpha, c in _t_column(beta, inv_sq).items():
            rows[index[alpha]][j] = Fraction(c)
    return FischerSystem(m, basis, tuple(tuple(r) for r in rows))


class _BlockCache:
    """Diagonal blocks keyed by (squares, degree, parity); thread-safe."""

    def __init__(self, maxsize=4096):
        self._data = {}
        self._lock = threading.Lock()
        self.maxsize = maxsize

    def get(self, inv_sq, k, parity):
        key = (tuple(inv_sq), k, parity)
        with self._lock:
            hit = self._data.get(key)
        if hit is not None:
            return hit
        basis = [
            a for a in exponents_of_degree(len(inv_sq), k)
            if tuple(x & 1 for x in a) == parity
        ]
        basis.sort()
        index = {b: i for i, b in enumerate(basis)}
        rows = [[0] * len(basis) for _ in basis]
        n = len(inv_sq)
        for j, beta in enumerate(basis):
            # laplacian(Q x^beta) only; the -laplacian(x^beta) part lives off-diagonal
            for jj in range(n):
                g = list(beta)
                g[jj] += 2
                for i in range(n):
                    ex = g[i]
                    if ex >= 2:
                        h = list(g)
                        h[i] -= 2
                        r = index[tuple(h)]
                        rows[r][j] += inv_sq[jj] * ex * (ex - 1)
        block = (tuple(basis), index, rows)
        with self._lock:
            if len(self._data) >= self.maxsize:
                self._data.clear()
            self._data[key] = block
        return block

    def clear(self):
        with self._lock:
            self._data.clear()


_CACHE = _BlockCache()


def clear_cache():
    _CACHE.clear()


@dataclass(frozen=True)
class HarmonicSolution:
    u: MultiPoly
    r: MultiPoly
    data: MultiPoly
    q: MultiPoly


def solve_dirichlet(e: Ellipsoid, p: MultiPoly, cache=True) -> HarmonicSolution:
    """Harmonic polynomial u with u = p on the boundary of `e`.

    `p` must be in rational mode and `e` must have rational squared
    semiaxes; the result is exact.
    """
    if p.mode != RATIONAL:
        raise TypeError("solve_dirichlet needs rational-mode data")
    if p.nvars != e.dim:
        raise ValueError(f"data has {p.nvars} variables, ellipsoid has dimension {e.dim}")
    q = defining_quadratic(e)
    n = e.dim
    zero = MultiPoly.zero(n)
    if p.is_zero() or p.degree <= 1:
        return HarmonicSolution(p, zero, p, q)
    inv_sq = _inv_squares(e)
    m = p.degree
    lap = p.laplacian()
    # components r_k, solved from k = m-2 down to 0
    r_terms = {}
    rhs_extra = {}  # laplacian(r_{k+2}) contributions, keyed by monomial
    blocks = _CACHE if cache else _BlockCache()
    for k in range(m - 2, -1, -1):
        target = {}
        for alpha, c in lap.terms.items():
            if sum(alpha) == k:
                target[alpha] = c
        for alpha, c in rhs_extra.items():
            if sum(alpha) == k:
                target[alpha] = target.get(alpha, 0) + c
        by_parity = {}
        for alpha, c in target.items():
            if c:
                by_parity.setdefault(tuple(x & 1 for x in alpha), {})[alpha] = c
        r_k = {}
        for parity, rhs in sorted(by_parity.items()):
            basis, index, rows = blocks.get(inv_sq, k, parity)
            vec = [Fraction(0)] * len(basis)
            for alpha, c in rhs.items():
                vec[index[alpha]] = c
            sol = bareiss_solve(rows, vec)
            for beta, c in zip(basis, sol):
                if c:
                    r_k[beta] = c
        r_terms.update(r_k)
        # laplacian(r_k) feeds the degree k-2 equation
        for alpha, c in MultiPoly._raw(r_k, n, RATIONAL).laplacian().terms.items():
            rhs_extra[alpha] = rhs_extra.get(alpha, 0) + c
    r = MultiPoly(r_terms, n, RATIONAL)
    u = p - q * r
    return HarmonicSolution(u, r, p, q)


def verify_solution(s: HarmonicSolution) -> VerificationReport:
    """Exact re-check of laplacian(u) = 0, u - data = -q*r and the degree bound."""
    lap = s.u.laplacian()
    residual = s.u - s.data + s.q * s.r
    deg_ok = s.u.degree <= s.data.degree
    samples = [
        _exact_sample("laplacian(u)", lap),
        _exact_sample("u - data + q*r", residual),
        {
            "input": "deg u <= deg data",
            "value": _deg(s.u),
            "reference": _deg(s.data),
            "abs_err": 0.0 if deg_ok else 1.0,
            "rel_err": 0.0 if deg_ok else 1.0,
        },
    ]
    return VerificationReport.from_samples(
        "dirichlet",
        {"data": str(s.data), "q": str(s.q)},
        samples,
        tolerance=0.0,
        exact=True,
    )


def _deg(p):
    d = p.degree
    return d if isinstance(d, int) else "-inf"


def _exact_sample(name, poly):
    ok = poly.is_zero()
    witness = None
    if not ok:
        alpha, c = poly.items()[0]
        witness = {"exponents": list(alpha), "coeff": str(c)}
    return {
        "input": name,
        "value": "0" if ok else str(poly),
        "reference": "0",
        "abs_err": 0.0 if ok else 1.0,
        "rel_err": 0.0 if ok else 1.0,
        "witness": witness,
    }


def fischer_determinant(e: Ellipsoid, m: int) -> Fraction:
    """det of T on P_{m-2} as the product of its diagonal blocks' determinants."""
    inv_sq = _inv_squares(e)
    det = Fraction(1)
    for k in range(m - 1):
        parities = sorted({tuple(x & 1 for x in a) for a in exponents_of_degree(e.dim, k)})
        for parity in parities:
            _, _, rows = _CACHE.get(inv_sq, k, parity)
            det *= bareiss_determinant(rows)
    return det


def harmonic_basis(n, degree):
    """Harmonic projections of the monomials of the given degree in n variables.

    They span the homogeneous harmonic polynomials of that degree; the list
    is not reduced to a basis, only zero projections are dropped.
    """
    out = []
    for alpha in exponents_of_degree(n, degree):
        h = harmonic_projection(MultiPoly.monomial(alpha))
        if not h.is_zero():
            out.append(h)
    return out
