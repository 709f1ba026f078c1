"""Run configuration: INI-style files with [problem], [grid], [solver] and
[output] sections.  Coefficient expressions are quoted strings in the
expression language; everything else is plain key = value."""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .curvop import ProblemSpec, SolverSettings
from .exprlang import ExprSyntaxError, parse
from .spheregeom import SphereGrid

__all__ = ["ConfigError", "RunConfig", "load_config"]


class ConfigError(ValueError):
    """Unusable configuration file."""


@dataclass
class RunConfig:
    problem: ProblemSpec
    outdir: Path
    write_csv: bool = True
    write_mesh: bool = True
    write_report: bool = True
    seed: int = 0
    verbosity: int = 1


def _unquote(text):
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    return text


def _get(section, key, cast, default=None):
    if key not in section:
        if default is None:
            raise ConfigError(f"missing key {key!r} in [{section.name}]")
        return default
    try:
        return cast(section[key])
    except ValueError as err:
        raise ConfigError(f"bad value for {key!r} in [{section.name}]: {err}") from err


def _get_bool(section, key, default):
    if key not in section:
        return default
    text = section[key].strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"bad boolean for {key!r} in [{section.name}]: {section[key]!r}")


def load_config(path):
    """Parse a configuration file into a RunConfig.

    Raises ConfigError on missing files, unparseable expressions, grid
    sizes outside the supported range, or malformed values.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"no such config file: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(path.read_text(encoding="utf-8"), source=str(path))
    except (configparser.Error, UnicodeDecodeError) as err:
        raise ConfigError(f"cannot parse {path}: {err}") from err

    for name in ("problem", "grid"):
        if name not in parser:
            raise ConfigError(f"missing [{name}] section in {path}")
    for name in ("solver", "output"):
        if name not in parser:
            parser.add_section(name)
    problem = parser["problem"]
    grid_sec = parser["grid"]
    solver_sec = parser["solver"]
    output = parser["output"]

    k = _get(problem, "k", int, default=2)
    n = _get(problem, "n", int, default=2)
    r1 = _get(problem, "r1", float)
    r2 = _get(problem, "r2", float)

    alphas = []
    for l in range(k):
        key = f"alpha{l}"
        if key not in problem:
            raise ConfigError(f"missing key {key!r} in [problem] (need alpha0..alpha{k-1})")
        try:
            alphas.append(parse(_unquote(problem[key])))
        except ExprSyntaxError as err:
            raise ConfigError(f"bad expression for {key!r}: {err}") from err
    if "phi" not in problem:
        raise ConfigError("missing key 'phi' in [problem]")
    try:
        phi = parse(_unquote(problem["phi"]))
    except ExprSyntaxError as err:
        raise ConfigError(f"bad expression for 'phi': {err}") from err

    try:
        grid = SphereGrid(
            _get(grid_sec, "ntheta", int, default=32),
            _get(grid_sec, "nphi", int, default=64),
        )
    except ValueError as err:
        raise ConfigError(f"bad grid: {err}") from err

    try:
        settings = SolverSettings(
            newton_tol=_get(solver_sec, "newton_tol", float, default=1e-10),
            newton_max_iter=_get(solver_sec, "newton_max_iter", int, default=50),
            max_backtracks=_get(solver_sec, "max_backtracks", int, default=8),
            t_step_initial=_get(solver_sec, "t_step_initial", float, default=0.1),
            t_step_max=_get(solver_sec, "t_step_max", float, default=0.25),
            t_step_min=_get(solver_sec, "t_step_min", float, default=1e-4),
        )
        spec = ProblemSpec(
            k=k, n=n, r1=r1, r2=r2, alphas=tuple(alphas), phi=phi,
            grid=grid, solver=settings,
        )
    except ValueError as err:
        raise ConfigError(str(err)) from err

    outdir = Path(_unquote(output["directory"]) if "directory" in output else "out")
    if not outdir.is_absolute():
        outdir = path.parent / outdir

    return RunConfig(
        problem=spec,
        outdir=outdir,
        write_csv=_get_bool(output, "csv", True),
        write_mesh=_get_bool(output, "mesh", True),
        write_report=_get_bool(output, "report", True),
        seed=_get(output, "seed", int, default=0),
        verbosity=_get(output, "verbosity", int, default=1),
    )
