"""Discrete calculus and extrinsic geometry of radial graphs over S^2.

A surface is a positive field rho on a staggered latitude/longitude grid
(no nodes at the poles); the embedding is X = rho(theta, phi) * x with x
the unit direction.  Derivatives are second-order central differences:
periodic in phi, and continued across each pole by the antipodal rule
value(-theta, phi) = value(theta, phi + pi).  All curvature quantities
come from closed-form 2x2 algebra, so a whole grid is a handful of
vectorized array operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exprlang import EvalEnv

__all__ = [
    "SphereGrid",
    "GeometryState",
    "covariant_gradient",
    "covariant_hessian",
    "geometry",
]

MIN_NTHETA, MAX_NTHETA = 4, 512
MIN_NPHI, MAX_NPHI = 8, 1024


class SphereGrid:
    """Staggered equiangular grid: theta_i = (i+1/2)*pi/ntheta,
    phi_j = j*2*pi/nphi.  nphi must be even so the antipodal meridian
    phi + pi lands on a grid column."""

    def __init__(self, ntheta, nphi):
        ntheta = int(ntheta)
        nphi = int(nphi)
        if not MIN_NTHETA <= ntheta <= MAX_NTHETA:
            raise ValueError(f"ntheta={ntheta} outside [{MIN_NTHETA}, {MAX_NTHETA}]")
        if not MIN_NPHI <= nphi <= MAX_NPHI:
            raise ValueError(f"nphi={nphi} outside [{MIN_NPHI}, {MAX_NPHI}]")
        if nphi % 2 != 0:
            raise ValueError(f"nphi={nphi} must be even")
        self.ntheta = ntheta
        self.nphi = nphi
        self.dtheta = math.pi / ntheta
        self.dphi = 2.0 * math.pi / nphi
        self.theta = (np.arange(ntheta) + 0.5) * self.dtheta
        self.phi = np.arange(nphi) * self.dphi
        self.sin_theta = np.sin(self.theta)
        self.cos_theta = np.cos(self.theta)
        self.cot_theta = self.cos_theta / self.sin_theta
        self._fd_structure = None  # lazy finite-difference dependency info

    @property
    def size(self):
        return self.ntheta * self.nphi

    @property
    def shape(self):
        return (self.ntheta, self.nphi)

    def check_field(self, field):
        field = np.asarray(field, dtype=float)
        if field.shape != self.shape:
            raise ValueError(f"field shape {field.shape} != grid shape {self.shape}")
        return field

    def pad(self, field):
        """Field with one ghost ring on every side: phi wraps periodically,
        theta continues across each pole via the antipodal column."""
        field = self.check_field(field)
        half = self.nphi // 2
        padded = np.empty((self.ntheta + 2, self.nphi + 2))
        padded[1:-1, 1:-1] = field
        padded[0, 1:-1] = np.roll(field[0], half)
        padded[-1, 1:-1] = np.roll(field[-1], half)
        padded[:, 0] = padded[:, -2]
        padded[:, -1] = padded[:, 1]
        return padded

    def directions(self):
        """Unit direction vectors of all nodes, three (ntheta, nphi) arrays."""
        st = self.sin_theta[:, None]
        ct = self.cos_theta[:, None]
        cp = np.cos(self.phi)[None, :]
        sp = np.sin(self.phi)[None, :]
        return st * cp, st * sp, ct * np.ones_like(cp)

    def node_env(self, rho):
        """EvalEnv with the ambient coordinates of every node."""
        rho = self.check_field(rho)
        d1, d2, d3 = self.directions()
        return EvalEnv(rho, rho * d1, rho * d2, rho * d3)


def _raw_derivatives(grid, field):
    padded = grid.pad(field)
    dt, dp = grid.dtheta, grid.dphi
    core = padded[1:-1, 1:-1]
    d_theta = (padded[2:, 1:-1] - padded[:-2, 1:-1]) / (2.0 * dt)
    d_phi = (padded[1:-1, 2:] - padded[1:-1, :-2]) / (2.0 * dp)
    d_tt = (padded[2:, 1:-1] - 2.0 * core + padded[:-2, 1:-1]) / (dt * dt)
    d_pp = (padded[1:-1, 2:] - 2.0 * core + padded[1:-1, :-2]) / (dp * dp)
    d_tp = (
        padded[2:, 2:] - padded[2:, :-2] - padded[:-2, 2:] + padded[:-2, :-2]
    ) / (4.0 * dt * dp)
    return d_theta, d_phi, d_tt, d_tp, d_pp


def covariant_gradient(grid, field):
    """Round-metric gradient (D_theta, D_phi) per node, shape (nt, np, 2)."""
    d_theta, d_phi, *_ = _raw_derivatives(grid, field)
    return np.stack([d_theta, d_phi], axis=-1)


def covariant_hessian(grid, field):
    """Covariant Hessian D_i D_j on the round sphere, shape (nt, np, 2, 2).

    Subtracts the Christoffel terms of the metric diag(1, sin^2 theta):
    the only nonzero symbols are G^t_pp = -sin t cos t and G^p_tp = cot t.
    """
    d_theta, d_phi, d_tt, d_tp, d_pp = _raw_derivatives(grid, field)
    st = grid.sin_theta[:, None]
    ct = grid.cos_theta[:, None]
    cot = grid.cot_theta[:, None]
    h_tt = d_tt
    h_tp = d_tp - cot * d_phi
    h_pp = d_pp + st * ct * d_theta
    hess = np.empty(field.shape + (2, 2))
    hess[..., 0, 0] = h_tt
    hess[..., 0, 1] = h_tp
    hess[..., 1, 0] = h_tp
    hess[..., 1, 1] = h_pp
    return hess


@dataclass
class GeometryState:
    """Extrinsic geometry of one radial graph, all fields per node."""

    grid: SphereGrid
    rho: np.ndarray
    v: np.ndarray                 # sqrt(1 + |D rho|^2 / rho^2)
    normal: np.ndarray            # outward unit normal, (nt, np, 3)
    metric: np.ndarray            # g_ij, (nt, np, 2, 2)
    metric_inv: np.ndarray        # g^ij
    second_form: np.ndarray       # h_ij
    shape_operator: np.ndarray    # h^i_j = g^ik h_kj
    kappa: np.ndarray             # principal curvatures, ascending, (nt, np, 2)
    support: np.ndarray           # <X, nu> = rho^2 / sqrt(rho^2 + |D rho|^2)
    mean_curvature: np.ndarray    # kappa_1 + kappa_2


def geometry(grid, rho):
    """Full extrinsic geometry of the radial graph rho over the grid."""
    rho = grid.check_field(rho)
    if np.any(rho <= 0.0):
        bad = np.argwhere(rho <= 0.0)[0]
        raise ValueError(f"rho must be positive, violated at node {tuple(bad)}")

    d_theta, d_phi, d_tt, d_tp, d_pp = _raw_derivatives(grid, rho)
    st = grid.sin_theta[:, None]
    ct = grid.cos_theta[:, None]
    cot = grid.cot_theta[:, None]
    sin2 = st * st

    hess_tt = d_tt
    hess_tp = d_tp - cot * d_phi
    hess_pp = d_pp + st * ct * d_theta

    grad_sq = d_theta * d_theta + (d_phi * d_phi) / sin2
    w = np.sqrt(rho * rho + grad_sq)
    v = w / rho
    support = rho * rho / w

    # outward unit normal: (rho e_rho - grad rho) / w, with the ambient
    # representation grad rho = D_theta rho e_theta + (D_phi rho / sin t) e_phi
    cp = np.cos(grid.phi)[None, :]
    sp = np.sin(grid.phi)[None, :]
    e_rho = np.stack([st * cp, st * sp, ct * np.ones_like(cp)], axis=-1)
    e_theta = np.stack([ct * cp, ct * sp, -st * np.ones_like(cp)], axis=-1)
    e_phi = np.stack([-sp * np.ones_like(st), cp * np.ones_like(st), np.zeros_like(st * cp)], axis=-1)
    grad_vec = d_theta[..., None] * e_theta + (d_phi / st)[..., None] * e_phi
    normal = (rho[..., None] * e_rho - grad_vec) / w[..., None]

    g_tt = rho * rho + d_theta * d_theta
    g_tp = d_theta * d_phi
    g_pp = rho * rho * sin2 + d_phi * d_phi

    inv_v = rho / w
    h_tt = inv_v * (-hess_tt + rho + 2.0 * d_theta * d_theta / rho)
    h_tp = inv_v * (-hess_tp + 2.0 * d_theta * d_phi / rho)
    h_pp = inv_v * (-hess_pp + rho * sin2 + 2.0 * d_phi * d_phi / rho)

    det_g = g_tt * g_pp - g_tp * g_tp
    gi_tt = g_pp / det_g
    gi_tp = -g_tp / det_g
    gi_pp = g_tt / det_g

    # symmetric square root inverse of g: for a 2x2 SPD matrix M,
    # sqrt(M) = (M + sqrt(det M) I) / tau with tau = sqrt(tr M + 2 sqrt(det M)),
    # so inv(sqrt(M)) = adj(M + sqrt(det M) I) / (sqrt(det M) tau)
    s = np.sqrt(det_g)
    tau = np.sqrt(g_tt + g_pp + 2.0 * s)
    a_tt = (g_pp + s) / (s * tau)
    a_tp = -g_tp / (s * tau)
    a_pp = (g_tt + s) / (s * tau)

    m_tt = a_tt * h_tt + a_tp * h_tp
    m_tp = a_tt * h_tp + a_tp * h_pp
    m_pt = a_tp * h_tt + a_pp * h_tp
    m_pp = a_tp * h_tp + a_pp * h_pp
    s_tt = m_tt * a_tt + m_tp * a_tp
    s_pp = m_pt * a_tp + m_pp * a_pp
    s_tp = 0.5 * ((m_tt * a_tp + m_tp * a_pp) + (m_pt * a_tt + m_pp * a_tp))

    half_trace = 0.5 * (s_tt + s_pp)
    radius = 0.5 * np.sqrt((s_tt - s_pp) ** 2 + 4.0 * s_tp * s_tp)
    kappa = np.stack([half_trace - radius, half_trace + radius], axis=-1)

    if not np.all(np.isfinite(kappa)):
        bad = np.argwhere(~np.isfinite(kappa))[0][:2]
        raise FloatingPointError(f"non-finite curvature at node {tuple(bad)}")

    metric = np.empty(rho.shape + (2, 2))
    metric[..., 0, 0] = g_tt
    metric[..., 0, 1] = g_tp
    metric[..., 1, 0] = g_tp
    metric[..., 1, 1] = g_pp
    metric_inv = np.empty_like(metric)
    metric_inv[..., 0, 0] = gi_tt
    metric_inv[..., 0, 1] = gi_tp
    metric_inv[..., 1, 0] = gi_tp
    metric_inv[..., 1, 1] = gi_pp
    second_form = np.empty_like(metric)
    second_form[..., 0, 0] = h_tt
    second_form[..., 0, 1] = h_tp
    second_form[..., 1, 0] = h_tp
    second_form[..., 1, 1] = h_pp
    shape_operator = np.empty_like(metric)
    shape_operator[..., 0, 0] = gi_tt * h_tt + gi_tp * h_tp
    shape_operator[..., 0, 1] = gi_tt * h_tp + gi_tp * h_pp
    shape_operator[..., 1, 0] = gi_tp * h_tt + gi_pp * h_tp
    shape_operator[..., 1, 1] = gi_tp * h_tp + gi_pp * h_pp

    return GeometryState(
        grid=grid,
        rho=rho,
        v=v,
        normal=normal,
        metric=metric,
        metric_inv=metric_inv,
        second_form=second_form,
        shape_operator=shape_operator,
        kappa=kappa,
        support=support,
        mean_curvature=kappa[..., 0] + kappa[..., 1],
    )
