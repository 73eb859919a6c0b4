"""Command-line interface: ``legendre-spectra {expand,product,bounds,solve,verify}``.

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 data error,
4 numerical divergence.
"""
from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from .bounds import DEFAULT_M_RANGE, bound_curve, mu_truncation_bound_j1
from .errors import DataError, DivergenceError, DomainError, LegendreError
from .expansion import (
    LegendreSeries,
    default_quadrature_order,
    mu_coefficients,
    parse_sampler,
    product_coefficients_finite,
    project,
    quadrature_margin,
    sampler_from_series,
)
from .files import (
    RunManifest,
    load_solve_job,
    read_series_csv,
    write_csv,
    write_reconstruction_csv,
    write_series_csv,
    write_trajectory_csv,
)
from .legendre_core import gauss_legendre_rule
from .pde import REPORT_N_PRIMES, REPORT_STEPS, error_grid, reconstruct, relative_error, solve_ivp

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_DIVERGENCE = 4


def _manifest_path(out: Path, explicit):
    return Path(explicit) if explicit else out.with_name(out.name + ".manifest.json")


def _echo_coefficients(series: LegendreSeries, count=8):
    for n, c in enumerate(series.coefficients[:count]):
        print(f"{n:3d}  {c: .17g}")
    if series.degree >= count:
        print(f"... ({series.degree + 1} coefficients)")


def cmd_expand(args) -> int:
    source = Path(args.function)
    manifest = RunManifest("expand", {})
    if source.is_file():
        sampler = sampler_from_series(read_series_csv(source), name=str(source))
        manifest.add_input(source)
    else:
        sampler = parse_sampler(args.function)
    order = args.order if args.order is not None else default_quadrature_order(args.degree)
    series = project(sampler, args.degree, gauss_legendre_rule(order))
    out = Path(args.output)
    write_series_csv(out, series)
    manifest.add_output(out)
    manifest.parameters = {
        "function": args.function,
        "degree": args.degree,
        "quadrature_order": order,
        "quadrature_margin": quadrature_margin(),
        "output": str(out),
    }
    _echo_coefficients(series)
    return _finish(manifest, _manifest_path(out, args.manifest), args)


def cmd_product(args) -> int:
    a = read_series_csv(args.a)
    b = read_series_csv(args.b)
    manifest = RunManifest("product", {})
    manifest.add_input(args.a)
    manifest.add_input(args.b)
    out = Path(args.output)
    extra = None
    if args.mode == "finite":
        degree = args.degree if args.degree is not None else a.degree + b.degree
        result = product_coefficients_finite(a, b, degree)
        M = None
    else:
        if args.M is None:
            raise DomainError("mu mode needs --M")
        if args.M < 0:
            raise DomainError(f"M must be non-negative, got {args.M}")
        degree = args.degree if args.degree is not None else a.degree + b.degree
        M = args.M
        result = LegendreSeries(mu_coefficients(a, b, degree + 1, M))
        if (args.A1 is None) != (args.B1 is None):
            raise DomainError("--A1 and --B1 must be given together")
        if args.A1 is not None:
            if M < 3:
                raise DomainError(f"the j = 1 bound column needs M >= 3, got {M}")
            extra = {"bound": [args.A1 * args.B1 * mu_truncation_bound_j1(k, M) for k in range(degree + 1)]}
    write_series_csv(out, result, extra)
    manifest.add_output(out)
    manifest.parameters = {
        "a": str(args.a), "b": str(args.b), "mode": args.mode, "degree": degree,
        "M": M, "A1": args.A1, "B1": args.B1, "output": str(out),
    }
    _echo_coefficients(result)
    return _finish(manifest, _manifest_path(out, args.manifest), args)


def cmd_bounds(args) -> int:
    lo_default, hi_default = DEFAULT_M_RANGE[args.j]
    lo = lo_default if args.M_min is None else args.M_min
    hi = hi_default if args.M_max is None else args.M_max
    rows = bound_curve(args.k, args.j, lo, hi)
    out = Path(args.output)
    write_csv(out, ("M", f"bound_j{args.j}", f"log_bound_j{args.j}"), rows)
    manifest = RunManifest(
        "bounds", {"k": args.k, "j": args.j, "M_min": lo, "M_max": hi, "output": str(out)}
    )
    manifest.add_output(out)
    return _finish(manifest, _manifest_path(out, args.manifest), args)


def cmd_solve(args) -> int:
    job = load_solve_job(args.spec)
    cfg = job.config
    if args.substeps is not None:
        cfg = replace(cfg, substeps=args.substeps)
    report_steps = args.report_steps or [m for m in REPORT_STEPS if m <= cfg.steps] or [cfg.steps]
    n_primes = args.n_primes or sorted({n for n in REPORT_N_PRIMES if n <= job.spec.N} | {cfg.N_prime})
    for m in report_steps:
        if not 0 <= m <= cfg.steps:
            raise DomainError(f"report step {m} outside 0..{cfg.steps}")
    for npr in n_primes:
        if not 0 <= npr <= job.spec.N:
            raise DomainError(f"N' = {npr} outside 0..{job.spec.N}")
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest("solve", {})
    manifest.add_input(args.spec)

    traj = solve_ivp(job.spec, cfg)

    manifest.add_output(write_trajectory_csv(outdir / "trajectory.csv", traj))
    xs = error_grid(args.dx)
    times = [float(traj.times[m]) for m in report_steps]
    exact = None
    if job.exact is not None:
        exact = [job.exact(xs, t) for t in times]
    err_rows = []
    for npr in n_primes:
        computed = [reconstruct(traj, m, npr, xs) for m in report_steps]
        path = outdir / f"reconstruction_Nprime{npr}.csv"
        manifest.add_output(write_reconstruction_csv(path, times, xs, computed, exact))
        if exact is not None:
            for m, t, tc, te in zip(report_steps, times, computed, exact):
                err_rows.append((m, t, npr, relative_error(tc, te)))
    if exact is not None:
        err_rows.sort()
        manifest.add_output(
            write_csv(outdir / "errors.csv", ("step", "t", "N_prime", "relative_error"), err_rows)
        )
        print(f"relative L2 error against the {job.exact_name} solution:")
        print("  step        t  " + "  ".join(f"N'={n:<8d}" for n in n_primes))
        for m in report_steps:
            vals = {r[2]: r[3] for r in err_rows if r[0] == m}
            print(f"{m:6d} {traj.times[m]:8.4g}  " + "  ".join(f"{vals[n]:<11.3e}" for n in n_primes))
    manifest.parameters = dict(
        job.resolved,
        substeps=traj.substeps,
        report_steps=list(report_steps),
        n_primes=list(n_primes),
        dx=args.dx,
        output=str(outdir),
    )
    return _finish(manifest, outdir / "manifest.json", args)


def cmd_verify(args) -> int:
    from .acceptance import CHECKS, run_check

    numbers = args.only or None
    failed = 0
    for n in numbers or sorted(CHECKS):
        if n not in CHECKS:
            raise DomainError(f"no criterion {n}; known: {sorted(CHECKS)}")
        r = run_check(n)
        print(r.line(), flush=True)
        failed += not r.passed
    total = len(numbers or CHECKS)
    print(f"{total - failed}/{total} criteria passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY_FAILED


def _finish(manifest: RunManifest, path: Path, args) -> int:
    manifest.wall_time_s = time.perf_counter() - args._t0
    manifest.write(path)
    return EXIT_OK


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive_float(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="legendre-spectra",
        description="Fourier-Legendre expansions, product coefficients, truncation bounds and a spectral PDE solver.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("expand", help="project a function onto P_0..P_degree")
    e.add_argument("function", help="built-in name (exp, sin_k:3, runge, manufactured_g, poly:[0,0,1], ...) or a series CSV")
    e.add_argument("--degree", type=int, required=True)
    e.add_argument("--order", type=int, help="Gauss-Legendre order (default degree + margin)")
    e.add_argument("-o", "--output", required=True)
    e.add_argument("--manifest", help="manifest path (default OUTPUT.manifest.json)")
    e.set_defaults(func=cmd_expand)

    q = sub.add_parser("product", help="Legendre coefficients of a product of two series")
    q.add_argument("a")
    q.add_argument("b")
    q.add_argument("--mode", choices=("finite", "mu"), default="finite")
    q.add_argument("--M", type=int, help="outer truncation index (mu mode)")
    q.add_argument("--degree", type=int, help="highest output degree (default deg a + deg b)")
    q.add_argument("--A1", type=float, help="scaled norm of a for the bound column (mu mode)")
    q.add_argument("--B1", type=float, help="scaled norm of b for the bound column (mu mode)")
    q.add_argument("-o", "--output", required=True)
    q.add_argument("--manifest")
    q.set_defaults(func=cmd_product)

    b = sub.add_parser("bounds", help="closed-form truncation bound curve over M")
    b.add_argument("--k", type=int, default=2)
    b.add_argument("--j", type=int, choices=(1, 2), default=1)
    b.add_argument("--M-min", dest="M_min", type=int)
    b.add_argument("--M-max", dest="M_max", type=int)
    b.add_argument("-o", "--output", required=True)
    b.add_argument("--manifest")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("solve", help="integrate the spectral PDE system from a JSON spec")
    s.add_argument("spec")
    s.add_argument("-o", "--output", required=True, help="output directory")
    s.add_argument("--report-steps", type=_int_list, help="comma-separated step indices")
    s.add_argument("--n-primes", type=_int_list, help="comma-separated reconstruction orders")
    s.add_argument("--substeps", type=int, help="RK4 steps per reporting step")
    s.add_argument("--dx", type=_positive_float, default=0.005, help="error-grid spacing")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--only", type=_int_list, help="comma-separated criterion numbers")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._t0 = time.perf_counter()
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LegendreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
