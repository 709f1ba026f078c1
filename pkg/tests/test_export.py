"""Solution files: lossless CSV round trips, watertight OBJ meshes,
and JSON reports."""

import json

import numpy as np
import pytest

from weingarten.continuation import check_hypotheses, continue_to_one
from weingarten.curvop import ProblemSpec
from weingarten.export import (
    SolutionFormatError,
    read_solution_csv,
    write_hypothesis_report,
    write_obj,
    write_solution_csv,
    write_solve_report,
)
from weingarten.spheregeom import SphereGrid


def bumpy_field(grid):
    th = grid.theta[:, None]
    ph = grid.phi[None, :]
    return 2.0 + 0.3 * np.cos(th) + 0.1 * np.sin(th) * np.cos(ph)


def test_csv_round_trip_is_bit_exact(tmp_path):
    grid = SphereGrid(8, 16)
    rho = bumpy_field(grid)
    path = tmp_path / "solution.csv"
    write_solution_csv(path, grid, rho)
    grid2, rho2 = read_solution_csv(path)
    assert grid2.shape == grid.shape
    assert np.array_equal(rho2, rho)


def test_csv_layout(tmp_path):
    grid = SphereGrid(8, 16)
    path = tmp_path / "solution.csv"
    write_solution_csv(path, grid, np.full(grid.shape, 2.0))
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "theta,phi,rho"
    assert len(lines) == 1 + grid.size
    # theta-major: the first nphi rows share theta_0
    first = {line.split(",")[0] for line in lines[1 : 1 + grid.nphi]}
    assert len(first) == 1


def test_csv_rejects_missing_file(tmp_path):
    with pytest.raises(SolutionFormatError):
        read_solution_csv(tmp_path / "nope.csv")


def test_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(SolutionFormatError):
        read_solution_csv(path)


def test_csv_rejects_wrong_lattice(tmp_path):
    grid = SphereGrid(8, 16)
    path = tmp_path / "solution.csv"
    write_solution_csv(path, grid, np.full(grid.shape, 2.0))
    lines = path.read_text().strip().splitlines()
    # perturb one theta so it is no longer a staggered grid node
    parts = lines[1].split(",")
    parts[0] = "0.123456"
    lines[1] = ",".join(parts)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(SolutionFormatError):
        read_solution_csv(path)


def test_csv_rejects_truncated_file(tmp_path):
    grid = SphereGrid(8, 16)
    path = tmp_path / "solution.csv"
    write_solution_csv(path, grid, np.full(grid.shape, 2.0))
    lines = path.read_text().strip().splitlines()
    path.write_text("\n".join(lines[:-3]) + "\n")
    with pytest.raises(SolutionFormatError):
        read_solution_csv(path)


def parse_obj(path):
    verts = []
    faces = []
    for line in path.read_text().splitlines():
        if line.startswith("v "):
            verts.append([float(x) for x in line.split()[1:]])
        elif line.startswith("f "):
            faces.append([int(x) for x in line.split()[1:]])
    return np.array(verts), faces


def test_obj_counts_and_euler_characteristic(tmp_path):
    grid = SphereGrid(8, 16)
    rho = bumpy_field(grid)
    path = tmp_path / "surface.obj"
    write_obj(path, grid, rho)
    verts, faces = parse_obj(path)
    nt, npj = grid.shape
    assert verts.shape == (nt * npj + 2, 3)
    assert len(faces) == 2 * nt * npj
    assert all(len(f) == 3 for f in faces)
    edges = set()
    for f in faces:
        for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
            edges.add((min(a, b), max(a, b)))
    v, e, fcount = verts.shape[0], len(edges), len(faces)
    assert v - e + fcount == 2


def test_obj_is_a_closed_manifold(tmp_path):
    grid = SphereGrid(8, 16)
    path = tmp_path / "surface.obj"
    write_obj(path, grid, bumpy_field(grid))
    _, faces = parse_obj(path)
    # every undirected edge is used by exactly two triangles, and the
    # two uses traverse it in opposite directions (consistent orientation)
    directed = {}
    for f in faces:
        for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
            directed[(a, b)] = directed.get((a, b), 0) + 1
    for (a, b), count in directed.items():
        assert count == 1
        assert directed.get((b, a), 0) == 1


def test_obj_faces_point_outward(tmp_path):
    # for a star-shaped surface every face normal has positive dot
    # product with the face centroid
    grid = SphereGrid(8, 16)
    path = tmp_path / "surface.obj"
    write_obj(path, grid, bumpy_field(grid))
    verts, faces = parse_obj(path)
    for f in faces:
        a, b, c = (verts[i - 1] for i in f)
        normal = np.cross(b - a, c - a)
        centroid = (a + b + c) / 3.0
        assert np.dot(normal, centroid) > 0.0


def test_obj_vertices_match_solution(tmp_path):
    grid = SphereGrid(8, 16)
    rho = bumpy_field(grid)
    path = tmp_path / "surface.obj"
    write_obj(path, grid, rho)
    verts, _ = parse_obj(path)
    radii = np.linalg.norm(verts[: grid.size], axis=1)
    assert np.allclose(radii, rho.ravel(), rtol=1e-15, atol=1e-14)


def small_benchmark():
    return ProblemSpec(
        k=2, n=2, r1=1.0, r2=4.0,
        alphas=("(0.6 - 0.05*rho)/rho^2", "0.25/rho"), phi="2.5/rho",
        grid=SphereGrid(8, 16),
    )


def test_report_files_are_valid_json(tmp_path):
    spec = small_benchmark()
    hyp = check_hypotheses(spec)
    hyp_path = tmp_path / "hypothesis_report.json"
    write_hypothesis_report(hyp_path, hyp)
    data = json.loads(hyp_path.read_text())
    assert data["passed"] is True

    rho, report = continue_to_one(spec)
    solve_path = tmp_path / "solve_report.json"
    write_solve_report(solve_path, report)
    data = json.loads(solve_path.read_text())
    assert data["reached_t1"] is True
    assert data["steps"][-1]["t"] == 1.0
