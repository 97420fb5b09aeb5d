"""Command line interface.

Exit status: 0 when every requested check passes (for ``--negative-control``
runs: when the expected failure is detected), 1 when a check fails, 2 on
usage or input errors, 3 when a numerical procedure misses its accuracy
target.  Reports go to stdout as JSON with sorted keys, so identical
invocations give identical bytes; ``--timing`` adds wall-clock times.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import EllipstoneError, NumericalFailure
from .geometry import parse_ellipsoid
from .polyalg import format_poly, parse_poly, to_json
from .report import SCHEMA, jsonable

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


def _floats(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def _lambdas(text):
    return [v.strip() for v in str(text).split(",") if v.strip()]


def _load_points(path, n):
    pts = np.asarray(json.loads(Path(path).read_text()), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != n:
        raise EllipstoneError(f"{path}: expected a list of {n}-dimensional points")
    return pts


def _emit(doc, args, t0=None):
    doc = dict(doc)
    doc.setdefault("schema", SCHEMA)
    if getattr(args, "timing", False) and t0 is not None:
        doc["wall_time"] = round(time.perf_counter() - t0, 6)
    sys.stdout.write(json.dumps(jsonable(doc), indent=2, sort_keys=True) + "\n")


def _report_doc(rep, args, t0):
    doc = rep.to_dict()
    if args.timing:
        doc["wall_time"] = round(time.perf_counter() - t0, 6)
    neg = getattr(args, "negative_control", False)
    if neg:
        doc["negative_control"] = True
        doc["expected_failure_detected"] = not rep.passed
    return doc, (not rep.passed) if neg else rep.passed


def _finish_report(rep, args, t0):
    doc, ok = _report_doc(rep, args, t0)
    sys.stdout.write(json.dumps(jsonable(doc), indent=2, sort_keys=True) + "\n")
    return EXIT_PASS if ok else EXIT_FAIL


def _write_out(args, name, text):
    if args.out:
        out = Path(args.out)
        if out.suffix:
            out.parent.mkdir(parents=True, exist_ok=True)
            target = out
        else:
            out.mkdir(parents=True, exist_ok=True)
            target = out / name
        target.write_text(text)
        return str(target)
    return None


# -- subcommands -----------------------------------------------------------------

def cmd_dirichlet(args):
    from .dirichlet import solve_dirichlet, verify_solution

    t0 = time.perf_counter()
    e = parse_ellipsoid(args.ellipsoid)
    p = parse_poly(args.data, nvars=e.dim, mode="rational")
    sol = solve_dirichlet(e, p)
    rep = verify_solution(sol)
    doc = {
        "ellipsoid": e.to_json(),
        "data": format_poly(p),
        "u": format_poly(sol.u),
        "r": format_poly(sol.r),
        "u_terms": to_json(sol.u),
        "report": rep.to_dict(),
        "pass": rep.passed,
    }
    _emit(doc, args, t0)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_moments(args):
    from .geometry import confocal
    from .moments import ellipsoid_integral, ellipsoid_mean

    t0 = time.perf_counter()
    e = parse_ellipsoid(args.ellipsoid)
    p = parse_poly(args.data, nvars=e.dim)
    doc = {"ellipsoid": e.to_json(), "data": format_poly(p), "mean": ellipsoid_mean(p, e),
           "integral": ellipsoid_integral(p, e)}
    if args.lambdas:
        doc["confocal_means"] = [
            {"lambda": lam, "mean": ellipsoid_mean(p, confocal(e, lam))} for lam in _lambdas(args.lambdas)
        ]
    _emit(doc, args, t0)
    return EXIT_PASS


def cmd_potential(args):
    from . import potentials as P

    t0 = time.perf_counter()
    e = parse_ellipsoid(args.ellipsoid)
    if args.kind in ("quadratic", "capacity"):
        if args.kind == "quadratic":
            q = P.interior_quadratic(e)
            doc = {"B": q.B, "A": q.A, "residual": q.residual, "laplacian": q.laplacian}
        else:
            doc = P.capacity(e).to_dict()
        doc["ellipsoid"] = e.to_json()
        doc["kind"] = args.kind
        _emit(doc, args, t0)
        return EXIT_PASS
    if args.points:
        pts = _load_points(args.points, e.dim)
    elif args.x:
        pts = np.array([_floats(args.x)])
    else:
        raise EllipstoneError("give --x or --points")
    # --tol is the cubature target here; None keeps each routine's default
    kw = {} if args.tol is None else {"tol": args.tol}
    fn = {
        "volume": lambda x: P.volume_potential(e, x, **kw),
        "gradient": lambda x: P.potential_gradient(e, x, **kw),
        "mother": lambda x: P.mother_body_potential(e, x, **kw),
        "equilibrium": lambda x: P.equilibrium_potential(e, x, **kw),
    }[args.kind]
    from .parallel import pmap

    vals = pmap(fn, pts, args.threads)
    doc = {"ellipsoid": e.to_json(), "kind": args.kind,
           "values": [{"x": x, "value": v} for x, v in zip(pts.tolist(), vals)]}
    _emit(doc, args, t0)
    return EXIT_PASS


def cmd_verify_maclaurin(args):
    from .dirichlet import harmonic_basis
    from .moments import maclaurin_check
    from .polyalg import squared_norm
    from .report import VerificationReport

    t0 = time.perf_counter()
    e = parse_ellipsoid(args.ellipsoid)
    lambdas = _lambdas(args.lambdas) if args.lambdas else ["0", "1", "7", "20"]
    if args.negative_control:
        probes = [squared_norm(e.dim)]
    elif args.data:
        probes = [parse_poly(args.data, nvars=e.dim)]
    else:
        probes = harmonic_basis(e.dim, args.degree)
    samples, exact = [], True
    for h in probes:
        rep = maclaurin_check(h, e, lambdas, tol=args.tol, require_harmonic=not args.negative_control)
        exact = exact and rep.exact
        for s in rep.samples:
            s = dict(s)
            s["input"] = {"h": format_poly(h), "lambda": s["input"]}
            samples.append(s)
    rep = VerificationReport.from_samples(
        "maclaurin",
        {"ellipsoid": e.to_json(), "degree": args.degree, "lambdas": lambdas, "probes": len(probes)},
        samples, 0.0 if exact else args.tol, exact=exact,
    )
    return _finish_report(rep, args, t0)


def _rng(args):
    return np.random.default_rng(args.seed)


def cmd_verify_newton(args):
    from . import potentials as P

    t0 = time.perf_counter()
    e = parse_ellipsoid(args.ellipsoid)
    rng = _rng(args)
    if args.points:
        pts = _load_points(args.points, e.dim)
    elif args.negative_control:
        # outside the outer ellipsoid the shell does attract
        pts = P.exterior_points(e.scaled(args.t), 5, rng, factors=(1.2, 2.0))
    else:
        pts = P.cavity_points(e, args.n, rng)
    rep = P.newton_check(e, args.t, pts, tol=args.tol, check_cavity=not args.negative_control,
                         threads=args.threads)
    return _finish_report(rep, args, t0)


def cmd_verify_motherbody(args):
    from . import potentials as P

    t0 = time.perf_counter()
    e = parse_ellipsoid(args.ellipsoid)
    rng = _rng(args)
    if args.points:
        pts = _load_points(args.points, e.dim)
    elif args.negative_control:
        # inside the ellipsoid (off E) the two potentials differ
        pts = P.cavity_points(e, 5, rng, depth=0.8)
        pts = pts[[abs(p[-1]) > 0.3 * e.axes[-1] for p in pts]]
    else:
        pts = P.exterior_points(e, args.n, rng)
    rep = P.mother_body_check(e, pts, tol=args.tol, allow_interior=args.negative_control,
                              threads=args.threads)
    return _finish_report(rep, args, t0)


def cmd_verify_equilibrium(args):
    from . import potentials as P
    from .geometry import confocal

    t0 = time.perf_counter()
    e = parse_ellipsoid(args.ellipsoid)
    rng = _rng(args)
    if args.points:
        pts = _load_points(args.points, e.dim)
    elif args.negative_control:
        # points on a confocal surface outside Gamma, where V < 1
        pts = P.boundary_points(confocal(e, 1), args.n, rng)
    else:
        pts = P.boundary_points(e, args.n, rng)
    rep = P.equilibrium_check(e, pts, tol=args.tol, threads=args.threads)
    return _finish_report(rep, args, t0)


def cmd_verify_ivory(args):
    from . import potentials as P

    t0 = time.perf_counter()
    e = parse_ellipsoid(args.ellipsoid)
    lambdas = [float(v) for v in _lambdas(args.lambdas)] if args.lambdas else [0.5, 2.0, 8.0]
    rep = P.ivory_check(e, lambdas, args.n, _rng(args), tol=args.tol,
                        homothetic=args.negative_control, threads=args.threads)
    return _finish_report(rep, args, t0)


def cmd_verify_continuation(args):
    from . import potentials as P

    t0 = time.perf_counter()
    e = parse_ellipsoid(args.ellipsoid)
    if args.points:
        path = _load_points(args.points, e.dim)
    else:
        # straight path from outside to the centre region, off the plane of E
        a = e.axes
        start = np.array([1.4 * a[0]] + [0.3 * v for v in a[1:]])
        end = np.array([0.5 * a[0]] + [0.3 * v for v in a[1:]])
        path = [start + s * (end - start) for s in np.linspace(0, 1, args.n)]
    rep = P.analytic_continuation_check(e, path, tol=args.tol, strict_interior=args.negative_control)
    return _finish_report(rep, args, t0)


def cmd_bergman(args):
    from .bergman import bergman_check

    t0 = time.perf_counter()
    a, b = _lambdas(args.semiaxes)
    rep = bergman_check(a, b, args.max_degree, tol=args.tol, negative_control=args.negative_control)
    table = rep.extra.pop("table")
    lines = ["m,offband_max,subdiagonal"]
    for m, off in enumerate(s["value"] for s in rep.samples if isinstance(s["input"], int)):
        lines.append(f"{m},{off!r},{table[m + 1][m]!r}")
    written = _write_out(args, "bergman_decay.csv", "\n".join(lines) + "\n")
    doc, ok = _report_doc(rep, args, t0)
    doc["recurrence_table"] = table
    if written:
        doc["csv"] = written
    sys.stdout.write(json.dumps(jsonable(doc), indent=2, sort_keys=True) + "\n")
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_heleshaw(args):
    from . import heleshaw as H

    t0 = time.perf_counter()
    e = parse_ellipsoid(args.ellipsoid)
    probes = None
    if args.probes:
        probes = json.loads(Path(args.probes).read_text())
        if isinstance(probes, dict):
            probes = probes["probes"]
    if args.growth:
        traj = H.simulate_growth(e, args.T, args.steps, seed=args.seed, tol=args.tol)
    else:
        traj = H.simulate(e, args.T, args.steps, probes=probes, mode=args.mode, tol=args.tol)
    written = _write_out(args, "heleshaw.csv", traj.to_csv())
    doc = dict(traj.summary)
    if written:
        doc["csv"] = written
    _emit(doc, args, t0)
    return EXIT_PASS if traj.summary["pass"] else EXIT_FAIL


# -- parser ----------------------------------------------------------------------

def _common(p, tol=None):
    p.add_argument("--ellipsoid", default="3,2,1", help="comma list of semiaxes or a JSON file")
    p.add_argument("--tol", type=float, default=tol, help="pass tolerance (default %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled points")
    p.add_argument("--out", help="file or directory for CSV side output")
    p.add_argument("--threads", type=int, default=None, help="worker threads (env ELLIPSTONE_THREADS)")
    p.add_argument("--timing", action="store_true", help="add wall_time to the JSON output")


def build_parser():
    parser = argparse.ArgumentParser(prog="ellipstone", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dirichlet", help="exact harmonic solution with polynomial boundary data")
    _common(p)
    p.add_argument("--data", required=True, help='polynomial, e.g. "x1^2*x2"')
    p.set_defaults(func=cmd_dirichlet)

    p = sub.add_parser("moments", help="exact mean of a polynomial over an ellipsoid")
    _common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--lambdas", help="also report means over confocal members")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("potential", help="evaluate potentials")
    _common(p)
    p.add_argument("--kind", default="volume",
                   choices=["volume", "gradient", "mother", "equilibrium", "quadratic", "capacity"])
    p.add_argument("--x", help="single point, comma list")
    p.add_argument("--points", help="JSON list of points")
    p.set_defaults(func=cmd_potential)

    p = sub.add_parser("bergman", help="Bergman polynomial recurrence of an ellipse")
    p.add_argument("--semiaxes", default="2,1")
    p.add_argument("--max-degree", type=int, default=15)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--negative-control", action="store_true", help="use the quartic-perturbed domain")
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_bergman)

    p = sub.add_parser("heleshaw", help="confocal shrink-down with Richardson residuals")
    _common(p, tol=1e-6)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--probes", help="JSON list of harmonic polynomials")
    p.add_argument("--mode", default="constant-rate", choices=["constant-rate", "linear-lambda"])
    p.add_argument("--growth", action="store_true", help="homothetic growth report instead")
    p.set_defaults(func=cmd_heleshaw)

    verify = sub.add_parser("verify", help="verification checks").add_subparsers(dest="check", required=True)
    specs = [
        ("maclaurin", cmd_verify_maclaurin, 1e-12, None),
        ("newton", cmd_verify_newton, 1e-6, 20),
        ("motherbody", cmd_verify_motherbody, 1e-6, 50),
        ("equilibrium", cmd_verify_equilibrium, 1e-5, 30),
        ("ivory", cmd_verify_ivory, 1e-5, 10),
        ("continuation", cmd_verify_continuation, 1e-5, 9),
    ]
    for name, func, tol, n in specs:
        p = verify.add_parser(name)
        _common(p, tol=tol)
        p.add_argument("--negative-control", action="store_true",
                       help="run a configuration that must fail")
        if n is not None:
            p.add_argument("--n", type=int, default=n, help="number of sampled points")
        if name in ("newton", "motherbody", "equilibrium", "continuation"):
            p.add_argument("--points", help="JSON list of points instead of sampling")
        if name == "maclaurin":
            p.add_argument("--degree", type=int, default=4)
            p.add_argument("--data", help="single harmonic polynomial instead of a degree sweep")
        if name in ("maclaurin", "ivory"):
            p.add_argument("--lambdas")
        if name == "newton":
            p.add_argument("--t", type=float, default=2.0, help="shell factor t > 1")
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalFailure as exc:
        doc = {"schema": SCHEMA, "pass": False, "error": type(exc).__name__, "message": str(exc),
               "estimate": jsonable(exc.estimate), "error_estimate": jsonable(exc.error)}
        sys.stdout.write(json.dumps(jsonable(doc), indent=2, sort_keys=True) + "\n")
        return EXIT_NUMERIC
    except (ValueError, TypeError, OSError, KeyError) as exc:
        print(f"ellipstone: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
