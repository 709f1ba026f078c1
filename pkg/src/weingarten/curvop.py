"""Curvature-quotient operator, its homotopy blend and its linearization.

The equation solved is, per node of a radial graph,

    sigma_k(kappa) / sigma_{k-1}(kappa)
        = sum_{l=0}^{k-2} t * alpha_l(X) * sigma_l(kappa) / sigma_{k-1}(kappa)
          + alpha_{k-1}(X, t)

with the top coefficient deformed toward a round-sphere problem,

    alpha_{k-1}(X, t) = t * alpha_{k-1}(X)
        + (1 - t) * phi(|X|) * (sigma_k(e)/sigma_{k-1}(e)) / |X|.

The residual is the left side minus the right side; its Jacobian with
respect to the nodal radii comes from one-sided finite differences of the
whole pipeline, probed in structurally independent column groups so one
residual evaluation fills many columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import symmfunc
from .exprlang import evaluate, parse
from .spheregeom import SphereGrid, geometry

__all__ = [
    "AdmissibilityError",
    "SolverSettings",
    "ProblemSpec",
    "alpha_blend",
    "residual",
    "residual_field",
    "jacobian",
    "ellipticity_check",
    "concavity_check",
]

#: slack for the midpoint concavity comparison
CONCAVITY_SLACK = 1e-10

#: an upper bound on nonzeros per Jacobian row (stencil footprint)
STENCIL_FOOTPRINT = 13


class AdmissibilityError(ArithmeticError):
    """Curvature vector left the cone Gamma_{k-1} at some node."""

    def __init__(self, node, order):
        super().__init__(
            f"sigma_{order}(kappa) <= 0 at node {node}: iterate left the admissible cone"
        )
        self.node = node
        self.order = order


@dataclass
class SolverSettings:
    """Newton and continuation tuning knobs."""

    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    max_backtracks: int = 8
    t_step_initial: float = 0.1
    t_step_max: float = 0.25
    t_step_min: float = 1e-4

    def __post_init__(self):
        if self.newton_tol <= 0:
            raise ValueError("newton_tol must be positive")
        if self.newton_max_iter < 1:
            raise ValueError("newton_max_iter must be at least 1")
        if not 0 < self.t_step_min <= self.t_step_initial <= self.t_step_max <= 1:
            raise ValueError("need 0 < t_step_min <= t_step_initial <= t_step_max <= 1")


@dataclass
class ProblemSpec:
    """One prescription problem: cone order, barrier radii, coefficient
    expressions alpha_0..alpha_{k-1}, deformation profile phi, grid and
    solver settings.  Expressions may be given as text or parsed ASTs."""

    k: int
    n: int
    r1: float
    r2: float
    alphas: tuple
    phi: object
    grid: SphereGrid
    solver: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self):
        if self.n != 2:
            raise ValueError("the surface solver works on 2-dimensional graphs (n=2)")
        if not 2 <= self.k <= self.n:
            raise ValueError(f"need 2 <= k <= n, got k={self.k}, n={self.n}")
        if not 0 < self.r1 < self.r2:
            raise ValueError("need 0 < r1 < r2")
        alphas = tuple(
            parse(a) if isinstance(a, str) else a for a in self.alphas
        )
        if len(alphas) != self.k:
            raise ValueError(f"need k={self.k} coefficient expressions, got {len(alphas)}")
        object.__setattr__(self, "alphas", alphas)
        if isinstance(self.phi, str):
            object.__setattr__(self, "phi", parse(self.phi))

    @property
    def round_ratio(self):
        """sigma_k(e)/sigma_{k-1}(e) for the all-ones vector of length n."""
        return math.comb(self.n, self.k) / math.comb(self.n, self.k - 1)


def alpha_blend(spec, env, t):
    """Deformed top coefficient alpha_{k-1}(X, t); affine in t, equal to
    alpha_{k-1}(X) at t=1 and to the round-sphere coefficient at t=0."""
    target = evaluate(spec.alphas[spec.k - 1], env)
    source = evaluate(spec.phi, env) * spec.round_ratio / env.rho
    return t * target + (1.0 - t) * source


def _sigma_fields(kappa, j):
    """sigma_j of the nodal curvature pair, vectorized (n=2)."""
    if j == 0:
        return np.ones(kappa.shape[:-1])
    if j == 1:
        return kappa[..., 0] + kappa[..., 1]
    return kappa[..., 0] * kappa[..., 1]


def residual(spec, geom, t):
    """Per-node residual of the deformed equation at homotopy time t.

    Requires kappa in Gamma_{k-1} at every node; raises AdmissibilityError
    (with the offending node) otherwise.
    """
    kappa = geom.kappa
    for j in range(1, spec.k):
        sig_j = _sigma_fields(kappa, j)
        if np.any(sig_j <= 0.0):
            bad = np.argwhere(sig_j <= 0.0)[0]
            raise AdmissibilityError(tuple(bad), j)

    denom = _sigma_fields(kappa, spec.k - 1)
    env = geom.grid.node_env(geom.rho)
    out = _sigma_fields(kappa, spec.k) / denom
    for l in range(spec.k - 1):
        coeff = evaluate(spec.alphas[l], env)
        out = out - t * coeff * _sigma_fields(kappa, l) / denom
    out = out - alpha_blend(spec, env, t)
    if not np.all(np.isfinite(out)):
        bad = np.argwhere(~np.isfinite(out))[0]
        raise FloatingPointError(f"non-finite residual at node {tuple(bad)}")
    return out


def residual_field(spec, rho, t):
    """Residual of a radius field: geometry plus residual in one call."""
    return residual(spec, geometry(spec.grid, rho), t)


def _build_fd_structure(grid):
    """Finite-difference dependency structure of the residual stencil.

    For each row (node) the set of columns it reads is its 3x3 padded
    neighborhood, with ghost rows mapped through the antipodal rule.  A
    greedy coloring groups columns whose influence sets never share a
    row, so each group is probed with a single residual evaluation.
    """
    nt, npj = grid.ntheta, grid.nphi
    half = npj // 2

    def node_id(i, j):
        return i * npj + j

    reads = []
    for i in range(nt):
        for j in range(npj):
            cols = set()
            for di in (-1, 0, 1):
                ii = i + di
                for dj in (-1, 0, 1):
                    jj = (j + dj) % npj
                    if ii < 0:
                        cols.add(node_id(0, (jj + half) % npj))
                    elif ii >= nt:
                        cols.add(node_id(nt - 1, (jj + half) % npj))
                    else:
                        cols.add(node_id(ii, jj))
            reads.append(sorted(cols))

    size = nt * npj
    rows_by_col = [[] for _ in range(size)]
    for row, cols in enumerate(reads):
        for q in cols:
            rows_by_col[q].append(row)

    color = np.full(size, -1, dtype=int)
    for q in range(size):
        used = set()
        for row in rows_by_col[q]:
            for p in reads[row]:
                if color[p] >= 0:
                    used.add(color[p])
        c = 0
        while c in used:
            c += 1
        color[q] = c

    groups = [np.flatnonzero(color == c) for c in range(color.max() + 1)]
    rows_by_col = [np.asarray(r, dtype=int) for r in rows_by_col]
    return groups, rows_by_col


def _fd_structure(grid):
    if grid._fd_structure is None:
        grid._fd_structure = _build_fd_structure(grid)
    return grid._fd_structure


def jacobian(spec, rho, t):
    """Sparse Jacobian d residual / d rho by grouped central finite
    differences of the full residual pipeline, step sqrt(eps)*max(1,|rho|).

    Central probes keep the truncation error O(h^2) even where the
    phi-direction stencils carry 1/sin(theta)^2 amplification near the
    poles; one-sided probes lose several digits there.
    """
    grid = spec.grid
    rho = grid.check_field(rho)
    flat = rho.ravel()
    groups, rows_by_col = _fd_structure(grid)
    sqrt_eps = math.sqrt(np.finfo(float).eps)

    rows_out = []
    cols_out = []
    data_out = []
    for group in groups:
        steps = sqrt_eps * np.maximum(1.0, np.abs(flat[group]))
        plus = flat.copy()
        plus[group] += steps
        minus = flat.copy()
        minus[group] -= steps
        f_plus = residual_field(spec, plus.reshape(grid.shape), t).ravel()
        f_minus = residual_field(spec, minus.reshape(grid.shape), t).ravel()
        for q, h in zip(group, steps):
            rows = rows_by_col[q]
            rows_out.append(rows)
            cols_out.append(np.full(rows.size, q, dtype=int))
            data_out.append((f_plus[rows] - f_minus[rows]) / (2.0 * h))

    rows_out = np.concatenate(rows_out)
    cols_out = np.concatenate(cols_out)
    data_out = np.concatenate(data_out)
    size = grid.size
    return sp.csr_matrix((data_out, (rows_out, cols_out)), shape=(size, size))


def _g_diagonal_derivative(lam, alphas, k):
    """Diagonal derivative dG/d lam_i of
    G = sigma_k/sigma_{k-1} - sum_{l<=k-2} alpha_l sigma_l/sigma_{k-1}."""
    sig = symmfunc.sigma_all(lam)
    grad_k = symmfunc.sigma_gradient(lam, k)
    grad_km1 = symmfunc.sigma_gradient(lam, k - 1)
    denom = sig[k - 1] ** 2
    g_ii = (grad_k * sig[k - 1] - sig[k] * grad_km1) / denom
    for l, a in enumerate(alphas):
        grad_l = np.zeros(lam.size) if l == 0 else symmfunc.sigma_gradient(lam, l)
        g_ii = g_ii - a * (grad_l * sig[k - 1] - sig[l] * grad_km1) / denom
    return g_ii


def ellipticity_check(lam, alphas, k):
    """Ellipticity of the operator at an eigenvalue vector in Gamma_{k-1}:
    returns (all diagonal derivatives positive, their minimum, their sum)."""
    lam = np.asarray(lam, dtype=float)
    n = lam.size
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    if len(alphas) != k - 1:
        raise ValueError(f"need k-1={k-1} coefficients alpha_0..alpha_{k-2}")
    if any(a < 0 for a in alphas):
        raise ValueError("coefficients must be nonnegative")
    if not symmfunc.in_gamma_cone(lam, k - 1):
        raise ValueError("eigenvalues must lie in Gamma_{k-1}")
    g_ii = _g_diagonal_derivative(lam, list(alphas), k)
    return bool(np.all(g_ii > 0.0)), float(g_ii.min()), float(g_ii.sum())


def _g_of_matrix(mat, alphas, k):
    lam = np.linalg.eigvalsh(mat)
    if not symmfunc.in_gamma_cone(lam, k - 1):
        raise ValueError("matrix eigenvalues must lie in Gamma_{k-1}")
    sig = symmfunc.sigma_all(lam)
    value = sig[k] / sig[k - 1]
    for l, a in enumerate(alphas):
        value -= a * sig[l] / sig[k - 1]
    return value


def concavity_check(mat_a, mat_b, alphas, k):
    """Midpoint concavity of the operator on symmetric matrices:
    G((A+B)/2) >= (G(A)+G(B))/2 up to a 1e-10 slack."""
    mat_a = np.asarray(mat_a, dtype=float)
    mat_b = np.asarray(mat_b, dtype=float)
    for mat in (mat_a, mat_b):
        if mat.shape != (2, 2):
            raise ValueError("matrices must be 2x2")
        if abs(mat[0, 1] - mat[1, 0]) > 1e-12 * max(1.0, np.abs(mat).max()):
            raise ValueError("matrices must be symmetric")
    if len(alphas) != k - 1:
        raise ValueError(f"need k-1={k-1} coefficients alpha_0..alpha_{k-2}")
    value_a = _g_of_matrix(mat_a, alphas, k)
    value_b = _g_of_matrix(mat_b, alphas, k)
    value_mid = _g_of_matrix(0.5 * (mat_a + mat_b), alphas, k)
    return bool(value_mid >= 0.5 * (value_a + value_b) - CONCAVITY_SLACK)
