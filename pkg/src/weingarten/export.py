"""Solution serialization: CSV fields, watertight OBJ meshes and reports.

The CSV layout is theta, phi, rho with one row per node in theta-major
order, values printed with 17 significant digits so a write/read round
trip is bit-lossless.  The OBJ mesh closes the two polar holes with fans
around ring-averaged pole vertices, giving a watertight genus-0 surface.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .spheregeom import SphereGrid

__all__ = [
    "SolutionFormatError",
    "write_solution_csv",
    "read_solution_csv",
    "write_obj",
    "write_solve_report",
    "write_hypothesis_report",
]

#: 17 significant digits round-trip IEEE doubles exactly
FLOAT_FORMAT = "%.17g"


class SolutionFormatError(ValueError):
    """Solution file does not match the expected layout."""


def write_solution_csv(path, grid, rho):
    rho = grid.check_field(rho)
    lines = ["theta,phi,rho"]
    for i in range(grid.ntheta):
        theta = FLOAT_FORMAT % grid.theta[i]
        for j in range(grid.nphi):
            lines.append(
                f"{theta},{FLOAT_FORMAT % grid.phi[j]},{FLOAT_FORMAT % rho[i, j]}"
            )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_solution_csv(path):
    """Read a solution CSV back into (grid, rho).

    The node lattice must match a staggered grid exactly (up to the
    print precision); anything else raises SolutionFormatError.
    """
    path = Path(path)
    if not path.is_file():
        raise SolutionFormatError(f"no such solution file: {path}")
    text = path.read_text(encoding="utf-8").strip().splitlines()
    if not text or text[0].strip().lower() != "theta,phi,rho":
        raise SolutionFormatError("expected header 'theta,phi,rho'")
    try:
        data = np.array(
            [[float(v) for v in line.split(",")] for line in text[1:]], dtype=float
        )
    except ValueError as err:
        raise SolutionFormatError(f"bad row in {path}: {err}") from err
    if data.ndim != 2 or data.shape[1] != 3 or data.shape[0] == 0:
        raise SolutionFormatError("expected rows of theta,phi,rho")

    thetas = np.unique(data[:, 0])
    phis = np.unique(data[:, 1])
    ntheta, nphi = thetas.size, phis.size
    if ntheta * nphi != data.shape[0]:
        raise SolutionFormatError("rows do not form a full theta x phi lattice")
    try:
        grid = SphereGrid(ntheta, nphi)
    except ValueError as err:
        raise SolutionFormatError(f"unsupported lattice: {err}") from err
    if not (
        np.allclose(thetas, grid.theta, rtol=0, atol=1e-12)
        and np.allclose(phis, grid.phi, rtol=0, atol=1e-12)
    ):
        raise SolutionFormatError("node lattice is not a staggered grid")

    expect_theta = np.repeat(grid.theta, nphi)
    expect_phi = np.tile(grid.phi, ntheta)
    if not (
        np.allclose(data[:, 0], expect_theta, rtol=0, atol=1e-12)
        and np.allclose(data[:, 1], expect_phi, rtol=0, atol=1e-12)
    ):
        raise SolutionFormatError("rows are not in theta-major order")
    return grid, data[:, 2].reshape(ntheta, nphi)


def write_obj(path, grid, rho):
    """Watertight triangle mesh of the radial graph.

    One vertex per node plus a ring-averaged vertex at each pole; quads
    between rings are split into triangles and the polar holes closed by
    fans, all faces oriented outward.
    """
    rho = grid.check_field(rho)
    d1, d2, d3 = grid.directions()
    xyz = np.stack([rho * d1, rho * d2, rho * d3], axis=-1)

    nt, npj = grid.ntheta, grid.nphi
    lines = []
    for i in range(nt):
        for j in range(npj):
            x, y, z = xyz[i, j]
            lines.append(
                f"v {FLOAT_FORMAT % x} {FLOAT_FORMAT % y} {FLOAT_FORMAT % z}"
            )
    north = xyz[0].mean(axis=0)
    south = xyz[-1].mean(axis=0)
    lines.append(f"v {FLOAT_FORMAT % north[0]} {FLOAT_FORMAT % north[1]} {FLOAT_FORMAT % north[2]}")
    lines.append(f"v {FLOAT_FORMAT % south[0]} {FLOAT_FORMAT % south[1]} {FLOAT_FORMAT % south[2]}")

    def vid(i, j):
        return i * npj + (j % npj) + 1

    north_id = nt * npj + 1
    south_id = nt * npj + 2
    for j in range(npj):
        lines.append(f"f {north_id} {vid(0, j)} {vid(0, j + 1)}")
    for i in range(nt - 1):
        for j in range(npj):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            lines.append(f"f {a} {b} {c}")
            lines.append(f"f {a} {c} {d}")
    for j in range(npj):
        lines.append(f"f {south_id} {vid(nt - 1, j + 1)} {vid(nt - 1, j)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_solve_report(path, report):
    Path(path).write_text(
        json.dumps(report.as_dict(), indent=2) + "\n", encoding="utf-8"
    )


def write_hypothesis_report(path, report):
    Path(path).write_text(
        json.dumps(report.as_dict(), indent=2) + "\n", encoding="utf-8"
    )
