"""CSV contracts shared by the command-line tools.

All files use '.' decimals, ',' separators, LF line endings and 17
significant digits.  Grid-shaped files emit one row per point in row-major
order with axis 1 varying fastest.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .espace import ScalarField, SpaceGrid, VectorField
from .kinetic import AgentEnsemble


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_rows(path, header: list[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) if isinstance(v, (int, float, np.floating)) else str(v)
                              for v in row) + "\n")


def _coord_columns(grid: SpaceGrid) -> list[np.ndarray]:
    # axis 1 fastest: Fortran-order flattening of ij-indexed meshes
    return [m.ravel(order="F") for m in grid.meshgrid()]


def coord_header(grid: SpaceGrid) -> list[str]:
    return [f"x{d + 1}" for d in range(grid.dim)]


def write_field_csv(path, grid: SpaceGrid, columns: list[tuple[str, np.ndarray]]) -> None:
    """Field snapshot: x coordinates then one column per named component."""
    header = coord_header(grid) + [name for name, _ in columns]
    coords = _coord_columns(grid)
    flats = [vals.ravel(order="F") for _, vals in columns]
    rows = zip(*coords, *flats)
    write_rows(path, header, rows)


def scalar_columns(name: str, f: ScalarField) -> list[tuple[str, np.ndarray]]:
    return [(name, f.values)]


def vector_columns(name: str, v: VectorField) -> list[tuple[str, np.ndarray]]:
    return [(f"{name}_{d + 1}", v.values[d]) for d in range(v.grid.dim)]


def read_field_csv(path, grid: SpaceGrid) -> dict[str, np.ndarray]:
    """Read a field snapshot back into grid-shaped arrays, keyed by column."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[0] != grid.num_points:
        raise ConfigError(
            f"{path}: {data.shape[0]} rows, grid needs {grid.num_points}"
        )
    expected = coord_header(grid)
    if header[: grid.dim] != expected:
        raise ConfigError(f"{path}: header must start with {expected}, got {header[:grid.dim]}")
    out = {}
    for i, name in enumerate(header[grid.dim:], start=grid.dim):
        out[name] = data[:, i].reshape(grid.shape, order="F")
    return out


def write_ensemble_csv(path, ens: AgentEnsemble) -> None:
    dim = ens.grid.dim
    header = [f"x{d + 1}" for d in range(dim)] + [f"v{d + 1}" for d in range(dim)] + list(
        ens.var_names
    )
    rows = (
        tuple(ens.coords[i]) + tuple(ens.velocities[i]) + tuple(ens.values[i])
        for i in range(len(ens))
    )
    write_rows(path, header, rows)


def read_ensemble_csv(path, grid: SpaceGrid, seed: int = 0) -> AgentEnsemble:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    dim = grid.dim
    if data.size == 0:
        data = data.reshape(0, len(header))
    if data.shape[1] != len(header):
        raise ConfigError(f"{path}: column count does not match header")
    var_names = header[2 * dim:]
    return AgentEnsemble(
        grid, data[:, :dim], data[:, dim : 2 * dim], data[:, 2 * dim :], var_names, seed
    )
