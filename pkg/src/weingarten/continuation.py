"""Hypothesis checking, initialization, damped Newton and homotopy driving.

The solve path is: certify the coefficient data (barrier inequalities at
the shell radii, monotone weighted coefficients, positivity, deformation
profile shape), start from the round sphere the profile singles out, and
walk the homotopy parameter t from 0 to 1 with adaptive steps, each step
accepted only when a damped Newton iteration converges while staying in
the admissible cone.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .curvop import AdmissibilityError, jacobian, residual_field
from .exprlang import Binary, Const, EvalEnv, Var, evaluate
from .spheregeom import geometry

__all__ = [
    "HypothesisEntry",
    "HypothesisReport",
    "HypothesisError",
    "InitializationError",
    "StagnationError",
    "ConeExitError",
    "ContinuationFailure",
    "NewtonResult",
    "SolveStep",
    "SolveReport",
    "check_hypotheses",
    "initial_solution",
    "newton_solve",
    "continue_to_one",
]

MIN_SAMPLES = 16
# Tolerance for non-strict hypothesis margins; absorbs finite-difference
# rounding when the true margin is exactly zero.
MARGIN_SLACK = 1e-10


class HypothesisError(RuntimeError):
    """Coefficient data failed certification; carries the report."""

    def __init__(self, report):
        super().__init__("hypothesis check failed: " + ", ".join(report.failed_names))
        self.report = report


class InitializationError(ValueError):
    """The deformation profile does not single out a starting sphere."""


class StagnationError(RuntimeError):
    """Line search exhausted without a residual decrease."""


class ConeExitError(RuntimeError):
    """No admissible iterate found along the Newton direction."""


class ContinuationFailure(RuntimeError):
    """Homotopy steps shrank below the minimum before reaching t=1."""

    def __init__(self, t_last, rho_last, report):
        super().__init__(f"continuation stalled at t={t_last:.6f}")
        self.t_last = t_last
        self.rho_last = rho_last
        self.report = report


@dataclass
class HypothesisEntry:
    """One certified condition: worst signed margin (nonnegative means the
    inequality holds; strict conditions need it positive), where the worst
    sample sits, and for the shell inequalities also the margin at the
    shell radius itself."""

    name: str
    strict: bool
    margin: float
    location: dict
    boundary_margin: float | None = None

    @property
    def passed(self):
        if self.strict:
            return self.margin > 0.0
        # Non-strict margins are often exactly zero in exact arithmetic
        # (e.g. a weighted coefficient that is constant in rho); allow
        # rounding noise from the finite-difference slope estimate.
        return self.margin >= -MARGIN_SLACK


@dataclass
class HypothesisReport:
    entries: dict

    @property
    def passed(self):
        return all(entry.passed for entry in self.entries.values())

    @property
    def failed_names(self):
        return [name for name, entry in self.entries.items() if not entry.passed]

    def as_dict(self):
        out = {"passed": self.passed, "checks": {}}
        for name, entry in self.entries.items():
            record = {
                "passed": entry.passed,
                "strict": entry.strict,
                "margin": entry.margin,
                "location": entry.location,
            }
            if entry.boundary_margin is not None:
                record["boundary_margin"] = entry.boundary_margin
            out["checks"][name] = record
        return out

    def table(self):
        lines = ["check                     status  worst margin   at"]
        for name, entry in self.entries.items():
            status = "pass" if entry.passed else "FAIL"
            where = ", ".join(f"{k}={v:.4g}" for k, v in entry.location.items())
            lines.append(f"{name:<25} {status:>6}  {entry.margin:+.6e}  {where}")
        return "\n".join(lines)


def _direction_lattice(n_theta=6, n_phi=8):
    """Deterministic unit directions: a staggered lattice plus both poles,
    so the extreme values u = +-1 are always sampled."""
    thetas = (np.arange(n_theta) + 0.5) * math.pi / n_theta
    phis = np.arange(n_phi) * 2.0 * math.pi / n_phi
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    d1 = (np.sin(tt) * np.cos(pp)).ravel()
    d2 = (np.sin(tt) * np.sin(pp)).ravel()
    d3 = np.cos(tt).ravel()
    d1 = np.concatenate([d1, [0.0, 0.0]])
    d2 = np.concatenate([d2, [0.0, 0.0]])
    d3 = np.concatenate([d3, [1.0, -1.0]])
    return d1, d2, d3


def _band_env(radii, directions):
    d1, d2, d3 = directions
    rr = np.repeat(radii, d1.size)
    x1 = rr * np.tile(d1, radii.size)
    x2 = rr * np.tile(d2, radii.size)
    x3 = rr * np.tile(d3, radii.size)
    return EvalEnv(rr, x1, x2, x3)


def _worst(values, env):
    # constant expressions evaluate to scalars; spread them over the lattice
    values = np.broadcast_to(np.asarray(values, dtype=float), np.shape(env.rho))
    idx = int(np.argmin(values))
    return float(values.ravel()[idx]), {
        "rho": float(np.ravel(env.rho)[idx]),
        "u": float(np.ravel(env.u)[idx]),
    }


def check_hypotheses(spec, samples=48):
    """Certify the coefficient data of a problem on sampled shells.

    Checks, each on a radius band times a direction lattice:
      shell_outer: sigma_k(e)/rho^k >= sum_l alpha_l sigma_l(e)/rho^l
                   on [r2, 2 r2]
      shell_inner: the reversed inequality on [r1/2, r1]
      weighted_monotone: d/d rho (rho^(k-l) alpha_l) <= 0 on [r1, r2]
      alpha_positive: alpha_l > 0 on [r1, r2]
      profile_positive / _above_one_inside / _below_one_outside /
      _decreasing: the shape conditions on the deformation profile.
    """
    if samples < MIN_SAMPLES:
        raise ValueError(f"samples={samples} below minimum {MIN_SAMPLES}")
    k, n = spec.k, spec.n
    r1, r2 = spec.r1, spec.r2
    dirs = _direction_lattice()
    sig_e = [math.comb(n, j) for j in range(n + 1)]

    band_outer = np.linspace(r2, 2.0 * r2, samples)
    band_inner = np.linspace(0.5 * r1, r1, samples)
    band_shell = np.linspace(r1, r2, samples)
    band_full = np.linspace(0.5 * r1, 2.0 * r2, 2 * samples)

    entries = {}

    def shell_gap(env):
        gap = sig_e[k] / env.rho**k
        for l, alpha in enumerate(spec.alphas):
            gap = gap - evaluate(alpha, env) * sig_e[l] / env.rho**l
        return gap

    env_outer = _band_env(band_outer, dirs)
    margin, location = _worst(shell_gap(env_outer), env_outer)
    ndir = dirs[0].size
    boundary = float(np.min(shell_gap(env_outer)[:ndir]))
    entries["shell_outer"] = HypothesisEntry(
        "shell_outer", False, margin, location, boundary_margin=boundary
    )

    env_inner = _band_env(band_inner, dirs)
    margin, location = _worst(-shell_gap(env_inner), env_inner)
    boundary = float(np.min(-shell_gap(env_inner)[-ndir:]))
    entries["shell_inner"] = HypothesisEntry(
        "shell_inner", False, margin, location, boundary_margin=boundary
    )

    env_shell = _band_env(band_shell, dirs)
    worst_margin = math.inf
    worst_location = {}
    fd_step = min(1e-5, 0.25 * r1)
    for l, alpha in enumerate(spec.alphas):
        weighted = Binary("*", Binary("^", Var("rho"), Const(float(k - l))), alpha)
        upper = evaluate(weighted, env_shell.along_ray(env_shell.rho + fd_step))
        lower = evaluate(weighted, env_shell.along_ray(env_shell.rho - fd_step))
        slope = (upper - lower) / (2.0 * fd_step)
        margin, location = _worst(-slope, env_shell)
        if margin < worst_margin:
            worst_margin = margin
            worst_location = dict(location, l=l)
    entries["weighted_monotone"] = HypothesisEntry(
        "weighted_monotone", False, worst_margin, worst_location
    )

    worst_margin = math.inf
    worst_location = {}
    for l, alpha in enumerate(spec.alphas):
        margin, location = _worst(evaluate(alpha, env_shell), env_shell)
        if margin < worst_margin:
            worst_margin = margin
            worst_location = dict(location, l=l)
    entries["alpha_positive"] = HypothesisEntry(
        "alpha_positive", True, worst_margin, worst_location
    )

    env_full = _band_env(band_full, dirs)
    profile_full = np.broadcast_to(
        np.asarray(evaluate(spec.phi, env_full), dtype=float), env_full.rho.shape
    )
    margin, location = _worst(profile_full, env_full)
    entries["profile_positive"] = HypothesisEntry(
        "profile_positive", True, margin, location
    )

    profile_inner = evaluate(spec.phi, env_inner)
    margin, location = _worst(profile_inner - 1.0, env_inner)
    entries["profile_above_one_inside"] = HypothesisEntry(
        "profile_above_one_inside", True, margin, location
    )

    profile_outer = evaluate(spec.phi, env_outer)
    margin, location = _worst(1.0 - profile_outer, env_outer)
    entries["profile_below_one_outside"] = HypothesisEntry(
        "profile_below_one_outside", True, margin, location
    )

    # sampled differences along each ray: later radius sample minus earlier
    per_ray = profile_full.reshape(band_full.size, ndir)
    drops = per_ray[:-1, :] - per_ray[1:, :]
    idx = np.unravel_index(int(np.argmin(drops)), drops.shape)
    entries["profile_decreasing"] = HypothesisEntry(
        "profile_decreasing",
        True,
        float(drops[idx]),
        {"rho": float(band_full[idx[0]]), "u": float(dirs[2][idx[1]])},
    )

    return HypothesisReport(entries)


def initial_solution(spec):
    """Constant starting field: the radius where the deformation profile
    crosses 1, found by bisection on [r1, r2] to 1e-12."""
    def profile(r):
        return float(evaluate(spec.phi, EvalEnv(r, 0.0, 0.0, r))) - 1.0

    lo, hi = spec.r1, spec.r2
    f_lo, f_hi = profile(lo), profile(hi)
    if f_lo <= 0.0 or f_hi >= 0.0:
        raise InitializationError(
            "deformation profile must cross 1 inside (r1, r2): "
            f"phi(r1)-1={f_lo:.3g}, phi(r2)-1={f_hi:.3g}"
        )
    while hi - lo > 2e-12:
        mid = 0.5 * (lo + hi)
        if profile(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    rho0 = 0.5 * (lo + hi)
    return np.full(spec.grid.shape, rho0)


@dataclass
class NewtonResult:
    rho: np.ndarray
    iterations: int
    residual_norms: list
    converged: bool


def newton_solve(spec, rho0, t):
    """Damped Newton on the nodal radii at fixed homotopy time t.

    Solves J delta = -F with a sparse direct factorization and backtracks
    by halving until the trial iterate is admissible and the residual
    max-norm strictly decreases.  Stops at newton_tol or newton_max_iter.
    """
    grid = spec.grid
    settings = spec.solver
    rho = grid.check_field(rho0).copy()
    res = residual_field(spec, rho, t)
    norms = [float(np.abs(res).max())]
    iterations = 0

    while norms[-1] > settings.newton_tol and iterations < settings.newton_max_iter:
        try:
            jac = jacobian(spec, rho, t)
        except AdmissibilityError as err:
            raise ConeExitError(
                f"admissibility lost while probing the Jacobian: {err}"
            ) from err
        delta = spla.spsolve(jac.tocsc(), -res.ravel()).reshape(grid.shape)

        step = 1.0
        accepted = False
        saw_admissible = False
        for _ in range(settings.max_backtracks + 1):
            trial = rho + step * delta
            if np.all(trial > 0.0):
                try:
                    trial_res = residual_field(spec, trial, t)
                except AdmissibilityError:
                    trial_res = None
                if trial_res is not None:
                    saw_admissible = True
                    if float(np.abs(trial_res).max()) < norms[-1]:
                        accepted = True
                        break
            step *= 0.5
        if not accepted:
            if saw_admissible:
                raise StagnationError(
                    f"no residual decrease after {settings.max_backtracks} halvings "
                    f"(t={t:.4f}, |F|={norms[-1]:.3e})"
                )
            raise ConeExitError(
                f"no admissible iterate along the Newton direction (t={t:.4f})"
            )

        rho = trial
        res = trial_res
        norms.append(float(np.abs(res).max()))
        iterations += 1

    return NewtonResult(rho, iterations, norms, norms[-1] <= settings.newton_tol)


@dataclass
class SolveStep:
    """One accepted continuation step plus its health monitors."""

    t: float
    newton_iters: int
    residual_inf: float
    rho_min: float
    rho_max: float
    support_min: float
    sigma1_min: float
    sigma2_min: float
    H_max: float
    wall_ms: float
    in_gamma_k: bool = True
    monitor_warnings: list = field(default_factory=list)
    newton_residual_norms: list = field(default_factory=list)

    def report_row(self):
        return {
            "t": self.t,
            "newton_iters": self.newton_iters,
            "residual_inf": self.residual_inf,
            "rho_min": self.rho_min,
            "rho_max": self.rho_max,
            "support_min": self.support_min,
            "sigma1_min": self.sigma1_min,
            "sigma2_min": self.sigma2_min,
            "H_max": self.H_max,
            "wall_ms": self.wall_ms,
        }


@dataclass
class SolveReport:
    steps: list
    hypothesis: HypothesisReport

    @property
    def reached_t1(self):
        return bool(self.steps) and self.steps[-1].t == 1.0

    @property
    def final_in_gamma_k(self):
        return bool(self.steps) and self.steps[-1].in_gamma_k

    def as_dict(self):
        return {
            "reached_t1": self.reached_t1,
            "final_in_gamma_k": self.final_in_gamma_k,
            "monitor_warnings": [
                {"t": step.t, "warnings": step.monitor_warnings}
                for step in self.steps
                if step.monitor_warnings
            ],
            "steps": [step.report_row() for step in self.steps],
        }


def _record_step(spec, rho, t, newton, wall_ms):
    geom = geometry(spec.grid, rho)
    sigma1 = geom.kappa[..., 0] + geom.kappa[..., 1]
    sigma2 = geom.kappa[..., 0] * geom.kappa[..., 1]
    warnings = []
    if not (rho.min() > spec.r1 and rho.max() < spec.r2):
        warnings.append("barrier: rho left (r1, r2)")
    if geom.support.min() <= 0.0:
        warnings.append("support: <X, nu> not positive")
    if sigma1.min() <= 0.0:
        warnings.append("cone: sigma_1(kappa) not positive")
    if not np.all(np.isfinite(geom.kappa)):
        warnings.append("curvature: non-finite values")
    return SolveStep(
        t=t,
        newton_iters=newton.iterations,
        residual_inf=newton.residual_norms[-1],
        rho_min=float(rho.min()),
        rho_max=float(rho.max()),
        support_min=float(geom.support.min()),
        sigma1_min=float(sigma1.min()),
        sigma2_min=float(sigma2.min()),
        H_max=float(geom.mean_curvature.max()),
        wall_ms=wall_ms,
        in_gamma_k=bool(sigma2.min() > 0.0),
        monitor_warnings=warnings,
        newton_residual_norms=list(newton.residual_norms),
    )


def continue_to_one(spec, samples=48, callback=None):
    """Walk the homotopy from the round-sphere problem to the target one.

    Refuses to run when the hypothesis check fails (HypothesisError).
    Steps in t start at t_step_initial, halve after a failed step, double
    after two consecutive accepted steps (capped at t_step_max), and a
    step below t_step_min aborts with ContinuationFailure.  Returns the
    final field and a SolveReport with one row per accepted step.
    """
    hypothesis = check_hypotheses(spec, samples=samples)
    if not hypothesis.passed:
        raise HypothesisError(hypothesis)

    settings = spec.solver
    rho = initial_solution(spec)
    steps = []

    begin = time.perf_counter()
    newton = newton_solve(spec, rho, 0.0)
    wall_ms = 1e3 * (time.perf_counter() - begin)
    rho = newton.rho
    step = _record_step(spec, rho, 0.0, newton, wall_ms)
    steps.append(step)
    if callback is not None:
        callback(step)

    t = 0.0
    dt = settings.t_step_initial
    consecutive = 0
    while t < 1.0:
        dt = min(dt, settings.t_step_max, 1.0 - t)
        target = 1.0 if (1.0 - t) - dt < 1e-12 else t + dt
        begin = time.perf_counter()
        try:
            newton = newton_solve(spec, rho, target)
            ok = newton.converged
        except (StagnationError, ConeExitError):
            ok = False
        wall_ms = 1e3 * (time.perf_counter() - begin)

        if not ok:
            consecutive = 0
            dt *= 0.5
            if dt < settings.t_step_min:
                raise ContinuationFailure(t, rho, SolveReport(steps, hypothesis))
            continue

        rho = newton.rho
        t = target
        consecutive += 1
        step = _record_step(spec, rho, t, newton, wall_ms)
        steps.append(step)
        if callback is not None:
            callback(step)
        if consecutive >= 2:
            dt = min(2.0 * dt, settings.t_step_max)
            consecutive = 0

    return rho, SolveReport(steps, hypothesis)
