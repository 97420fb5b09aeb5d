"""Confocal shrink-down of an ellipsoidal Hele-Shaw blob, and homothetic growth.

Shrink-down: the fluid region at time t is the confocal ellipsoid
Omega_lam(t), lam decreasing from 0 to -a_N^2, where it collapses onto the
focal ellipsoid E.  Fluid is removed by a continuum of sinks on E,

    dQ_t = -(d/dt Vol(Omega_lam(t)) / Vol(Omega_0)) dmu,

mu the mother-body measure of Omega_0.  Richardson's identity for a harmonic
probe u then reads

    d/dt int_{Omega_t} u dV + int_E u dQ_t = 0,

and its residual is what `richardson_residual` measures.  The left term is
a central difference (Richardson extrapolated) of the exact moments; the
sink term is a cubature over E.

Growth: Omega_t = s(t) Omega_0 with the volume growing at a constant rate
(fluid in the exterior, sink at infinity).  The family is exact because the
shell between two members exerts no force in the cavity, which is what the
growth report checks.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateFocal, EllipstoneError, HarmonicityViolated
from .geometry import Ellipsoid, volume
from .moments import ellipsoid_mean
from .polyalg import MultiPoly, evaluate_many, parse_poly
from .potentials import cavity_points, force_scale, mother_body, shell_force
from .report import VerificationReport

CONSTANT_RATE = "constant-rate"
LINEAR_LAMBDA = "linear-lambda"
MODES = (CONSTANT_RATE, LINEAR_LAMBDA)

DEFAULT_PROBES = ("1", "x1", "x1^2 - x2^2", "x1^4 - 6*x1^2*x2^2 + x2^4")


def _log_volume_ratio(e, mu):
    """log(Vol(Omega_lam) / Vol(Omega_0)) with mu = lam + a_N^2 > 0.

    Working with the offset mu keeps the ratio accurate as lam -> -a_N^2.
    """
    sq = e.squares_float
    return 0.5 * float(np.sum(np.log((sq - sq[-1] + mu) / sq)))


@dataclass(frozen=True)
class ExtractionSchedule:
    """lam(t) for t < T, with lam(0) = 0 and lam -> -a_N^2 as t -> T."""

    base: Ellipsoid
    T: float
    mode: str

    @property
    def v0(self):
        return volume(self.base)

    @property
    def floor(self):
        return -float(self.base.squares_float[-1])

    def offset(self, t):
        """mu(t) = lam(t) + a_N^2, the distance to the collapse."""
        t = float(t)
        if t >= self.T:
            raise EllipstoneError(f"t={t} is not before the extinction time T={self.T}")
        aN2 = -self.floor
        if self.mode == LINEAR_LAMBDA:
            return aN2 * (1.0 - t / self.T)
        if t == 0:
            return aN2
        # constant rate: Vol/V0 = 1 - t/T, solved for log(mu)
        target = math.log1p(-t / self.T)
        f = lambda s: _log_volume_ratio(self.base, math.exp(s)) - target  # noqa: E731
        lo, hi = 2.0 * target + math.log(aN2), math.log(aN2)
        while f(lo) > 0:
            lo -= 10.0
        while f(hi) < 0:  # t < 0 (central differences at the start)
            hi += 1.0
        return math.exp(brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500))

    def lam(self, t):
        if self.mode == LINEAR_LAMBDA:
            return self.floor * float(t) / self.T
        mu = self.offset(t)
        return 0.0 if t == 0 else mu + self.floor

    def _squares(self, t):
        sq = self.base.squares_float
        return sq - sq[-1] + self.offset(t)

    def ellipsoid(self, t):
        if t == 0:
            return self.base
        return Ellipsoid.from_squares(self._squares(t).tolist())

    def volume(self, t):
        return self.v0 * math.exp(_log_volume_ratio(self.base, self.offset(t)))

    def dlam_dt(self, t):
        if self.mode == LINEAR_LAMBDA:
            return self.floor / self.T
        dv_dlam = self.volume(t) * 0.5 * float(np.sum(1.0 / self._squares(t)))
        return -(self.v0 / self.T) / dv_dlam

    def dvol_dt(self, t):
        """Analytic d/dt Vol(Omega_lam(t))."""
        if self.mode == CONSTANT_RATE:
            return -self.v0 / self.T
        dv_dlam = self.volume(t) * 0.5 * float(np.sum(1.0 / self._squares(t)))
        return dv_dlam * self.dlam_dt(t)


def make_schedule(e: Ellipsoid, T, mode=CONSTANT_RATE) -> ExtractionSchedule:
    if mode not in MODES:
        raise EllipstoneError(f"mode must be one of {MODES}")
    if not T > 0:
        raise EllipstoneError("T must be positive")
    if not e.focal_nondegenerate:
        raise DegenerateFocal(f"{e!r}: confocal shrink-down needs a_(N-1) > a_N")
    return ExtractionSchedule(e, float(T), mode)


@dataclass(frozen=True)
class SinkMeasure:
    """dQ_t = rate(t) / V0 * dmu on E; total mass rate(t) = -d/dt Vol."""

    schedule: ExtractionSchedule

    def rate(self, t):
        return -self.schedule.dvol_dt(t)

    def integrate(self, u: MultiPoly, t, order=None):
        """int_E u dQ_t by cubature against the mother body."""
        mb = mother_body(self.schedule.base)
        order = order or max(16, (u.degree if u.degree > 0 else 0) + 4)
        pts, w = mb.nodes(order)
        return self.rate(t) / self.schedule.v0 * float(evaluate_many(u, pts).real @ w)


def probe_moment(sched: ExtractionSchedule, u: MultiPoly, t):
    """int_{Omega_lam(t)} u dV = Vol * mean, from the exact moment formula."""
    e = sched.ellipsoid(t)
    mean = ellipsoid_mean(u, e)
    return sched.volume(t) * float(complex(mean).real)


def richardson_residual(sched: ExtractionSchedule, u: MultiPoly, t, dt=None, full=False):
    """|dI/dt + int_E u dQ_t| / scale with I(t) = int_{Omega_t} u dV.

    dI/dt is the central difference at steps dt and dt/2 combined by
    Richardson extrapolation; dt defaults to T/1e4.
    """
    if not u.laplacian().is_zero():
        raise HarmonicityViolated(f"probe {u} is not harmonic")
    dt = sched.T * 1e-4 if dt is None else float(dt)
    if t + dt >= sched.T:
        raise EllipstoneError("t + dt must stay before the extinction time")
    I = lambda s: probe_moment(sched, u, s)  # noqa: E731
    d1 = (I(t + dt) - I(t - dt)) / (2 * dt)
    h = dt / 2
    d2 = (I(t + h) - I(t - h)) / (2 * h)
    didt = (4 * d2 - d1) / 3
    sink = SinkMeasure(sched).integrate(u, t)
    scale = max(abs(didt), abs(sink), sched.v0 / sched.T)
    res = abs(didt + sink) / scale
    if full:
        return res, didt, sink
    return res


def _probes(probes, n):
    out = []
    for p in probes or DEFAULT_PROBES:
        if isinstance(p, str):
            p = parse_poly(p, nvars=n)
        if p.nvars != n:
            raise EllipstoneError(f"probe {p} has {p.nvars} variables, ellipsoid dimension {n}")
        if not p.laplacian().is_zero():
            raise HarmonicityViolated(f"probe {p} is not harmonic")
        out.append(p)
    return out


@dataclass
class Trajectory:
    columns: list
    rows: list
    summary: dict

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_csv_value(v) for v in r])
        return buf.getvalue()


def _csv_value(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else v


def simulate(e: Ellipsoid, T=1.0, steps=100, probes=None, mode=CONSTANT_RATE, tol=1e-6,
             mass_tol=1e-10):
    """Shrink-down trajectory with per-step probe moments and Richardson residuals.

    Steps are t_k = k T / steps for k = 0..steps-1 (extinction at T itself
    is excluded).  The summary holds the worst residual per probe, the mass
    balance (probe u = 1 against the total pumping rate) and pass flags.
    """
    sched = make_schedule(e, T, mode)
    probes = _probes(probes, e.dim)
    cols = ["step", "t", "lambda"] + [f"a{j + 1}" for j in range(e.dim)] + ["volume", "pump_rate"]
    for k in range(len(probes)):
        cols += [f"moment{k}", f"residual{k}"]
    rows = []
    worst = [0.0] * len(probes)
    means = [[] for _ in probes]
    one = MultiPoly.constant(1, e.dim)
    mass = 0.0
    for k in range(steps):
        t = k * T / steps
        lam = sched.lam(t)
        ax = np.sqrt(e.squares_float + lam)
        vol = sched.volume(t)
        row = [k, t, lam] + ax.tolist() + [vol, -sched.dvol_dt(t)]
        for i, u in enumerate(probes):
            mom = probe_moment(sched, u, t)
            res = richardson_residual(sched, u, t)
            worst[i] = max(worst[i], res)
            means[i].append(mom / vol)
            row += [mom, res]
        res, didt, sink = richardson_residual(sched, one, t, full=True)
        mass = max(mass, abs(didt + sink) / (sched.v0 / T))
        rows.append(row)
    drift = [float(np.max(np.abs(np.array(m) - m[0]))) / max(abs(m[0]), 1.0) for m in means]
    summary = {
        "ellipsoid": e.to_json(), "T": float(T), "steps": steps, "mode": mode,
        "probes": [str(p) for p in probes],
        "max_residual": worst, "mean_drift": drift,
        "mass_balance": mass, "tolerance": tol, "mass_tolerance": mass_tol,
        "pass": bool(max(worst) <= tol and mass <= mass_tol),
    }
    return Trajectory(cols, rows, summary)


def simulate_growth(e: Ellipsoid, T=1.0, steps=20, cavity_samples=5, seed=0, tol=1e-6):
    """Homothetic growth s(t) Omega_0 with Vol = V0 (1 + t/T).

    Each step checks that the shell between consecutive members exerts no
    force at sampled cavity points (relative to the boundary force scale).
    """
    if e.dim < 3:
        raise EllipstoneError("growth mode needs N >= 3")
    rng = np.random.default_rng(seed)
    n = e.dim
    v0 = volume(e)
    cols = ["step", "t", "scale", "volume", "shell_force_rel"]
    rows = []
    worst = 0.0
    for k in range(steps):
        t0, t1 = k * T / steps, (k + 1) * T / steps
        s0, s1 = (1 + t0 / T) ** (1 / n), (1 + t1 / T) ** (1 / n)
        inner = e.scaled(s0)
        fs = force_scale(inner)
        pts = cavity_points(inner, cavity_samples, rng)
        rel = max(float(np.linalg.norm(shell_force(inner, s1 / s0, x))) for x in pts) / fs
        worst = max(worst, rel)
        rows.append([k, t0, s0, v0 * (1 + t0 / T), rel])
    summary = {"ellipsoid": e.to_json(), "T": float(T), "steps": steps, "mode": "growth",
               "max_shell_force_rel": worst, "tolerance": tol, "pass": bool(worst <= tol)}
    return Trajectory(cols, rows, summary)


def richardson_report(traj: Trajectory) -> VerificationReport:
    s = traj.summary
    samples = []
    for probe, res in zip(s["probes"], s["max_residual"]):
        samples.append({"input": probe, "value": res, "reference": 0.0, "abs_err": res, "rel_err": res})
    rep = VerificationReport.from_samples("heleshaw", {k: s[k] for k in ("ellipsoid", "T", "steps", "mode")},
                                          samples, s["tolerance"], extra={"mass_balance": s["mass_balance"],
                                                                          "mean_drift": s["mean_drift"]})
    if s["mass_balance"] > s["mass_tolerance"]:
        rep.passed = False
    return rep
