"""Command line entry points: check, solve, verify, export.

Exit codes: 0 success, 1 hypothesis or verification failure, 2 unusable
input (missing files, malformed config or solution), 3 continuation
failure.  The only recognized environment variable is WEINGARTEN_THREADS,
which caps the linear-algebra thread pools.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .config import ConfigError, load_config
from .continuation import (
    ContinuationFailure,
    HypothesisError,
    check_hypotheses,
    continue_to_one,
)
from .curvop import AdmissibilityError, residual_field
from .export import (
    SolutionFormatError,
    read_solution_csv,
    write_hypothesis_report,
    write_obj,
    write_solution_csv,
    write_solve_report,
)
from .spheregeom import geometry

__all__ = ["main"]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_STALLED = 3


def _apply_thread_env():
    threads = os.environ.get("WEINGARTEN_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)


def _progress_printer(verbosity):
    if verbosity < 1:
        return None

    def show(step):
        print(
            f"  t={step.t:6.4f}  newton={step.newton_iters:2d}  "
            f"|F|={step.residual_inf:9.3e}  rho=[{step.rho_min:.6f}, {step.rho_max:.6f}]"
            + ("  " + "; ".join(step.monitor_warnings) if step.monitor_warnings else "")
        )

    return show


def cmd_check(args):
    cfg = load_config(args.config)
    report = check_hypotheses(cfg.problem)
    print(report.table())
    if cfg.write_report:
        cfg.outdir.mkdir(parents=True, exist_ok=True)
        out = cfg.outdir / "hypothesis_report.json"
        write_hypothesis_report(out, report)
        if cfg.verbosity >= 1:
            print(f"report written to {out}")
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_solve(args):
    cfg = load_config(args.config)
    spec = cfg.problem
    if cfg.verbosity >= 1:
        print(f"solving on a {spec.grid.ntheta}x{spec.grid.nphi} grid:")
    try:
        rho, report = continue_to_one(spec, callback=_progress_printer(cfg.verbosity))
    except HypothesisError as err:
        print(err.report.table())
        print("hypothesis check failed; not solving")
        return EXIT_FAILED
    except ContinuationFailure as err:
        print(f"continuation stalled at t={err.t_last:.6f}")
        return EXIT_STALLED

    cfg.outdir.mkdir(parents=True, exist_ok=True)
    written = []
    if cfg.write_csv:
        path = cfg.outdir / "solution.csv"
        write_solution_csv(path, spec.grid, rho)
        written.append(path)
    if cfg.write_mesh:
        path = cfg.outdir / "surface.obj"
        write_obj(path, spec.grid, rho)
        written.append(path)
    if cfg.write_report:
        path = cfg.outdir / "solve_report.json"
        write_solve_report(path, report)
        written.append(path)
        path = cfg.outdir / "hypothesis_report.json"
        write_hypothesis_report(path, report.hypothesis)
        written.append(path)
    if cfg.verbosity >= 1:
        final = report.steps[-1]
        print(
            f"reached t=1: |F|={final.residual_inf:.3e}, "
            f"rho in [{final.rho_min:.8f}, {final.rho_max:.8f}]"
        )
        for path in written:
            print(f"wrote {path}")
    return EXIT_OK


def cmd_verify(args):
    cfg = load_config(args.config)
    spec = cfg.problem
    grid, rho = read_solution_csv(args.solution)
    if grid.shape != spec.grid.shape:
        print(
            f"solution grid {grid.shape} does not match config grid {spec.grid.shape}"
        )
        return EXIT_BAD_INPUT

    failures = []
    try:
        geom = geometry(spec.grid, rho)
    except (ValueError, FloatingPointError) as err:
        print(f"verification failed: {err}")
        return EXIT_FAILED

    if not (rho.min() > spec.r1 and rho.max() < spec.r2):
        failures.append(
            f"barrier: rho range [{rho.min():.6g}, {rho.max():.6g}] "
            f"not inside ({spec.r1:g}, {spec.r2:g})"
        )
    support_min = float(geom.support.min())
    if support_min <= 0.0:
        failures.append(f"support: min <X, nu> = {support_min:.6g} <= 0")
    sigma1 = geom.kappa[..., 0] + geom.kappa[..., 1]
    sigma2 = geom.kappa[..., 0] * geom.kappa[..., 1]
    if sigma1.min() <= 0.0:
        failures.append(f"cone: min sigma_1(kappa) = {sigma1.min():.6g} <= 0")

    tol = 10.0 * spec.solver.newton_tol
    try:
        res_inf = float(np.abs(residual_field(spec, rho, 1.0)).max())
        if res_inf > tol:
            failures.append(f"residual: |F| = {res_inf:.3e} > {tol:.1e}")
    except AdmissibilityError as err:
        failures.append(f"residual: {err}")
        res_inf = float("nan")

    print(
        f"residual_inf={res_inf:.3e}  rho=[{rho.min():.8f}, {rho.max():.8f}]  "
        f"support_min={support_min:.6f}  sigma1_min={sigma1.min():.6f}  "
        f"sigma2_min={sigma2.min():.6f}"
    )
    if failures:
        for line in failures:
            print(f"FAIL {line}")
        return EXIT_FAILED
    print("verification passed")
    return EXIT_OK


def cmd_export(args):
    load_config(args.config)  # validates the config, including the grid bounds
    grid, rho = read_solution_csv(args.solution)
    out = args.output
    if out is None:
        suffix = ".obj" if args.format == "obj" else ".csv"
        base = args.solution
        out = os.path.splitext(base)[0] + "_export" + suffix
    if args.format == "obj":
        write_obj(out, grid, rho)
    else:
        write_solution_csv(out, grid, rho)
    print(f"wrote {out}")
    return EXIT_OK


def main(argv=None):
    _apply_thread_env()
    parser = argparse.ArgumentParser(
        prog="weingarten",
        description="curvature-quotient surfaces: certify, solve, verify, export",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="certify the coefficient hypotheses")
    p_check.add_argument("config")
    p_check.set_defaults(func=cmd_check)

    p_solve = sub.add_parser("solve", help="run the homotopy to t=1")
    p_solve.add_argument("config")
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="re-check a stored solution")
    p_verify.add_argument("solution")
    p_verify.add_argument("config")
    p_verify.set_defaults(func=cmd_verify)

    p_export = sub.add_parser("export", help="convert a stored solution")
    p_export.add_argument("solution")
    p_export.add_argument("config")
    p_export.add_argument("--format", choices=("obj", "csv"), required=True)
    p_export.add_argument("--output", default=None)
    p_export.set_defaults(func=cmd_export)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SolutionFormatError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
