"""Acceptance criteria, one test per criterion.

Each criterion is a plain function returning (ok, detail); the tests record
the outcome for the terminal summary (see conftest.py) and then assert it.
Run this file directly for the same report without pytest.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from ellipstone.bergman import area_moments, bandwidth_sweep, disk_coefficient, orthonormalize, \
    quartic_domain_moments, recurrence_bandwidth, recurrence_matrix
from ellipstone.dirichlet import harmonic_basis, solve_dirichlet, verify_solution
from ellipstone.geometry import Ellipsoid, confocal, defining_quadratic, volume
from ellipstone.heleshaw import simulate
from ellipstone.moments import ellipsoid_mean, maclaurin_check
from ellipstone.polyalg import MultiPoly, dot_power, exponents_of_degree, exponents_up_to, fischer_inner, \
    parse_poly, squared_norm
from ellipstone.potentials import boundary_points, capacity, cavity_points, equilibrium_potential, \
    exterior_points, force_scale, interior_quadratic, mother_body, mother_body_potential, shell_force, \
    volume_potential

# tolerances and budgets, as stated in the acceptance criteria
DIRICHLET_CASES = 200
DIRICHLET_MAX_DEGREE = 8
DIRICHLET_SECONDS = 60.0
MACLAURIN_MAX_DEGREE = 8
MACLAURIN_MIN_LAMBDAS = 4
MACLAURIN_SECONDS = 10.0
MOTHER_POINTS = 50
MOTHER_TOL = 1e-6
MOTHER_MASS_TOL = 1e-8
MOTHER_SECONDS = 300.0
NEWTON_POINTS = 20
NEWTON_TOL = 1e-6
FIT_RESIDUAL_TOL = 1e-5
BALL_TOL = 1e-6
EQUILIBRIUM_POINTS = 30
EQUILIBRIUM_TOL = 1e-5
IVORY_SPREAD_TOL = 1e-5
CAPACITY_SCALING_TOL = 1e-4
DISK_TOL = 1e-10
DISK_MAX_M = 18
OFFBAND_TOL = 1e-10
CONTROL_TOL = 1e-6
RICHARDSON_STEPS = 100
RICHARDSON_TOL = 1e-6
MASS_BALANCE_TOL = 1e-10
FISCHER_FLOAT_TOL = 1e-12
ISOTROPIC_TOL = 1e-12

SEED = 20240601


# -- 1. Dirichlet exactness ----------------------------------------------------

ELLIPSOIDS = {
    2: ["3,2", "2,2", "5/2,1", "1,1", "7,3"],
    3: ["3,2,1", "2,2,1", "1,1,1", "3,3/2,3/2", "5,4,3"],
    4: ["4,3,2,1", "2,2,2,1", "1,1,1,1", "3,2,2,1/2", "5/2,2,3/2,1"],
    5: ["5,4,3,2,1", "2,2,1,1,1", "1,1,1,1,1", "3,3,2,2,1", "4,3,2,1,1/2"],
}


def _ellipsoid(text):
    return Ellipsoid([Fraction(v) for v in text.split(",")])


def _random_poly(rng, n, deg, terms=8):
    exps = list(exponents_up_to(n, deg))
    top = list(exponents_of_degree(n, deg))
    out = {top[rng.integers(len(top))]: Fraction(int(rng.integers(1, 10)), int(rng.integers(1, 7)))}
    for _ in range(terms - 1):
        out[exps[rng.integers(len(exps))]] = Fraction(int(rng.integers(-12, 13)), int(rng.integers(1, 7)))
    return MultiPoly(out, n)


def criterion_1():
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    failures = 0
    count = 0
    for i in range(DIRICHLET_CASES):
        n = 2 + i % 4
        e = _ellipsoid(ELLIPSOIDS[n][(i // 4) % 5])
        deg = int(rng.integers(0, DIRICHLET_MAX_DEGREE + 1)) if i % 3 else DIRICHLET_MAX_DEGREE
        p = _random_poly(rng, n, deg)
        s = solve_dirichlet(e, p)
        q = defining_quadratic(e)
        ok = (s.u.laplacian().is_zero()
              and (s.u - p + q * s.r).is_zero()
              and (p.is_zero() or s.u.is_zero() or s.u.degree <= p.degree)
              and verify_solution(s).passed)
        failures += not ok
        count += 1
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed <= DIRICHLET_SECONDS
    return ok, f"{count} cases, {failures} failures, {elapsed:.1f}s (limit {DIRICHLET_SECONDS:.0f}s)"


# -- 2. MacLaurin constancy ------------------------------------------------------

MACLAURIN_CASES = [
    ("3,2,1", ["0", "1", "7/2", "20"]),
    ("4,3,2,1", ["0", "1/3", "2", "15"]),
    ("5,4,3,2,1", ["0", "1/2", "3", "11"]),
]


def criterion_2():
    t0 = time.perf_counter()
    probes = failures = 0
    for text, lams in MACLAURIN_CASES:
        e = _ellipsoid(text)
        lams = [Fraction(v) for v in lams]
        assert len(lams) >= MACLAURIN_MIN_LAMBDAS
        for d in range(MACLAURIN_MAX_DEGREE + 1):
            for h in harmonic_basis(e.dim, d):
                rep = maclaurin_check(h, e, lams)
                probes += 1
                failures += not (rep.passed and rep.exact)
    elapsed = time.perf_counter() - t0
    e = _ellipsoid("3,2,1")
    control = maclaurin_check(squared_norm(3), e, [0, 1, 7, 20], require_harmonic=False)
    ok = failures == 0 and not control.passed and elapsed <= MACLAURIN_SECONDS
    return ok, (f"{probes} harmonic probes over N=3,4,5, {failures} failures, control detected="
                f"{not control.passed}, {elapsed:.1f}s (limit {MACLAURIN_SECONDS:.0f}s)")


# -- 3. Mother body ----------------------------------------------------------------

MOTHER_ELLIPSOIDS = ["3,2,1", "2,1.5,1", "4,2,0.5"]


def criterion_3():
    rng = np.random.default_rng(SEED + 3)
    t0 = time.perf_counter()
    worst = worst_mass = 0.0
    for text in MOTHER_ELLIPSOIDS:
        e = Ellipsoid([float(v) for v in text.split(",")])
        for x in exterior_points(e, MOTHER_POINTS, rng):
            u = volume_potential(e, x)
            worst = max(worst, abs(mother_body_potential(e, x) - u) / abs(u))
        worst_mass = max(worst_mass, abs(mother_body(e).total_mass() - volume(e)) / volume(e))
    elapsed = time.perf_counter() - t0
    ok = worst <= MOTHER_TOL and worst_mass <= MOTHER_MASS_TOL and elapsed <= MOTHER_SECONDS
    return ok, (f"max rel mismatch {worst:.2e} (tol {MOTHER_TOL:g}), mass err {worst_mass:.2e} "
                f"(tol {MOTHER_MASS_TOL:g}), {elapsed:.1f}s")


# -- 4. Newton shell -----------------------------------------------------------------

def criterion_4():
    rng = np.random.default_rng(SEED + 4)
    e = Ellipsoid([3, 2, 1])
    scale = force_scale(e)
    worst = 0.0
    for t in (1.5, 2.0):
        for x in cavity_points(e, NEWTON_POINTS, rng):
            worst = max(worst, float(np.linalg.norm(shell_force(e, t, x))) / scale)
    fit = interior_quadratic(e)
    ball = interior_quadratic(Ellipsoid([1, 1, 1]))
    ball_err = max(abs(ball.B - 0.5), float(np.max(np.abs(ball.A - 1 / 6))))
    ok = worst <= NEWTON_TOL and fit.residual <= FIT_RESIDUAL_TOL and ball_err <= BALL_TOL
    return ok, (f"cavity force {worst:.2e} (tol {NEWTON_TOL:g}), fit residual {fit.residual:.2e} "
                f"(tol {FIT_RESIDUAL_TOL:g}), ball B/A err {ball_err:.2e} (tol {BALL_TOL:g})")


# -- 5. Equilibrium / Ivory -------------------------------------------------------------

def criterion_5():
    rng = np.random.default_rng(SEED + 5)
    e = Ellipsoid([3, 2, 1])
    on_gamma = max(abs(equilibrium_potential(e, x) - 1.0) for x in boundary_points(e, EQUILIBRIUM_POINTS, rng))
    spreads = []
    for lam in (0.5, 2.0, 8.0):
        vals = [equilibrium_potential(e, x) for x in boundary_points(confocal(e, lam), 10, rng)]
        spreads.append((max(vals) - min(vals)) / abs(np.mean(vals)))
    sigma = capacity(e).value
    scaling = max(abs(capacity(e.scaled(t)).value - t ** (e.dim - 2) * sigma) / (t ** (e.dim - 2) * sigma)
                  for t in (0.5, 2, 3))
    ok = on_gamma <= EQUILIBRIUM_TOL and max(spreads) <= IVORY_SPREAD_TOL and scaling <= CAPACITY_SCALING_TOL
    return ok, (f"|V-1| on boundary {on_gamma:.2e}, Ivory spreads {max(spreads):.2e} (tol {IVORY_SPREAD_TOL:g}), "
                f"capacity scaling err {scaling:.2e} (tol {CAPACITY_SCALING_TOL:g})")


# -- 6. Bergman recurrence --------------------------------------------------------------

def criterion_6():
    M = area_moments(1, 1, DISK_MAX_M)
    a = recurrence_matrix(orthonormalize(M), M)
    disk = max(abs(a[m + 1, m] - disk_coefficient(m)) for m in range(DISK_MAX_M + 1))
    M = area_moments(2, 1, 15)
    bw = recurrence_bandwidth(recurrence_matrix(orthonormalize(M), M), OFFBAND_TOL)
    sweep = bandwidth_sweep(lambda d: area_moments(2, 1, d), range(6, 16), OFFBAND_TOL)
    control = bandwidth_sweep(quartic_domain_moments, range(6, 16, 3), CONTROL_TOL)
    stable = len(set(sweep)) == 1 and sweep[0] == bw.value
    grows = len(set(control)) > 1 and control[-1] > control[0]
    ok = disk <= DISK_TOL and stable and bw.value == 2 and max(bw.offband) <= OFFBAND_TOL and grows
    return ok, (f"disk err {disk:.1e}, ellipse bandwidth {bw.value} stable={stable} off-band "
                f"{max(bw.offband):.1e}, control bandwidths {control}")


# -- 7. Richardson -------------------------------------------------------------------------

def criterion_7():
    deg4 = "x1^4 - 6*x1^2*x2^2 + x2^4"
    traj = simulate(Ellipsoid([3, 2, 1]), T=1.0, steps=RICHARDSON_STEPS,
                    probes=["1", "x1", "x1^2 - x2^2", deg4], tol=RICHARDSON_TOL, mass_tol=MASS_BALANCE_TOL)
    s = traj.summary
    ok = max(s["max_residual"]) <= RICHARDSON_TOL and s["mass_balance"] <= MASS_BALANCE_TOL
    return ok, (f"max residual {max(s['max_residual']):.1e} (tol {RICHARDSON_TOL:g}), mass balance "
                f"{s['mass_balance']:.1e} (tol {MASS_BALANCE_TOL:g}) over {RICHARDSON_STEPS} steps")


# -- 8. Fischer machinery --------------------------------------------------------------------

def _random_homogeneous(rng, n, deg, complex_=False):
    exps = list(exponents_of_degree(n, deg))
    terms = {}
    for _ in range(5):
        alpha = exps[rng.integers(len(exps))]
        terms[alpha] = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5)))
    p = MultiPoly(terms, n)
    return p.to_complex() if complex_ else p


def criterion_8():
    rng = np.random.default_rng(SEED + 8)
    exact_ok = True
    float_err = iso_err = 0.0
    for n in (2, 3, 4, 5):
        r2 = squared_norm(n)
        for m in range(2, 8):
            f, g = _random_homogeneous(rng, n, m), _random_homogeneous(rng, n, m - 2)
            exact_ok &= fischer_inner(f.laplacian(), g) == fischer_inner(f, r2 * g)
            xi = [Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))) for _ in range(n)]
            exact_ok &= fischer_inner(f, dot_power(xi, m)) / math.factorial(m) == f.eval(xi)
            fc, gc = f.to_complex(), g.to_complex()
            lhs, rhs = fischer_inner(fc.laplacian(), gc), fischer_inner(fc, r2.to_complex() * gc)
            float_err = max(float_err, abs(lhs - rhs) / max(abs(rhs), 1.0))
            xc = rng.normal(size=n) + 1j * rng.normal(size=n)
            val = fc.eval(xc)
            got = fischer_inner(fc, dot_power(xc, m)) / math.factorial(m)
            float_err = max(float_err, abs(got - val) / max(abs(val), 1.0))
        for m in range(1, 9):
            q, _ = np.linalg.qr(rng.normal(size=(n, 2)))
            p = dot_power(q[:, 0] + 1j * q[:, 1], m)
            scale = max(abs(c) for c in p.terms.values())
            lap = max((abs(c) for c in p.laplacian().terms.values()), default=0.0)
            iso_err = max(iso_err, lap / scale)
    ok = exact_ok and float_err <= FISCHER_FLOAT_TOL and iso_err <= ISOTROPIC_TOL
    return ok, (f"exact identities hold={exact_ok}, float err {float_err:.1e} (tol {FISCHER_FLOAT_TOL:g}), "
                f"isotropic Laplacian {iso_err:.1e} (tol {ISOTROPIC_TOL:g})")


CRITERIA = [
    (1, "Dirichlet exactness", criterion_1),
    (2, "MacLaurin constancy", criterion_2),
    (3, "Mother body", criterion_3),
    (4, "Newton shell", criterion_4),
    (5, "Equilibrium and Ivory", criterion_5),
    (6, "Bergman recurrence", criterion_6),
    (7, "Richardson identity", criterion_7),
    (8, "Fischer machinery", criterion_8),
]


@pytest.mark.parametrize("number,name,func", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, name, func, acceptance_record):
    ok, detail = func()
    acceptance_record(number, name, ok, detail)
    assert ok, detail


def format_line(number, name, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] {number}. {name}: {detail}"


if __name__ == "__main__":
    import sys

    failed = 0
    for number, name, func in CRITERIA:
        ok, detail = func()
        failed += not ok
        print(format_line(number, name, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
