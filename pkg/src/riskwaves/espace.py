"""Discretized risk-coordinate space and its differential operators.

A grid covers the box [0, X_1] x ... x [0, X_dim] with a fixed number of
cells per axis.  Periodic grids store node values x_j = j*dx; reflective
grids store cell-center values x_j = (j + 1/2)*dx, so both layouts hold
exactly ``cells`` points per axis and dx = X/cells.

All operators use centered second-order differences in the interior.
Periodic boundaries wrap around; reflective boundaries use one-sided
second-order differences for first derivatives and an even-extension ghost
cell for the Laplacian.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalError, ShapeError

PERIODIC = "periodic"
REFLECTIVE = "reflective"


@dataclass(frozen=True)
class SpaceGrid:
    dim: int
    extent: tuple[float, ...]
    cells: tuple[int, ...]
    boundary: str = PERIODIC

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ConfigError(f"dim must be 1, 2 or 3, got {self.dim}")
        object.__setattr__(self, "extent", tuple(float(x) for x in self.extent))
        object.__setattr__(self, "cells", tuple(int(c) for c in self.cells))
        if len(self.extent) != self.dim or len(self.cells) != self.dim:
            raise ConfigError("extent and cells must have one entry per axis")
        if any(x <= 0 for x in self.extent):
            raise ConfigError(f"extent must be positive, got {self.extent}")
        if any(c < 4 for c in self.cells):
            raise ConfigError(f"need at least 4 cells per axis, got {self.cells}")
        if self.boundary not in (PERIODIC, REFLECTIVE):
            raise ConfigError(f"boundary must be periodic or reflective, got {self.boundary!r}")

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(x / c for x, c in zip(self.extent, self.cells))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells

    @property
    def num_points(self) -> int:
        return int(np.prod(self.cells))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis_coords(self, d: int) -> np.ndarray:
        dx = self.spacing[d]
        j = np.arange(self.cells[d])
        if self.boundary == PERIODIC:
            return j * dx
        return (j + 0.5) * dx

    def meshgrid(self) -> list[np.ndarray]:
        axes = [self.axis_coords(d) for d in range(self.dim)]
        return list(np.meshgrid(*axes, indexing="ij"))


def _check_finite(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))[0]
        raise NumericalError(f"nonfinite value in {what} at index {tuple(int(i) for i in bad)}")


@dataclass
class ScalarField:
    grid: SpaceGrid
    values: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.values is None:
            self.values = np.zeros(self.grid.shape)
        else:
            self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ShapeError(
                f"scalar field shape {self.values.shape} does not match grid {self.grid.shape}"
            )

    @classmethod
    def full(cls, grid: SpaceGrid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid: SpaceGrid, fn) -> "ScalarField":
        return cls(grid, np.asarray(fn(*grid.meshgrid()), dtype=float))

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())


@dataclass
class VectorField:
    grid: SpaceGrid
    values: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.values is None:
            self.values = np.zeros((self.grid.dim,) + self.grid.shape)
        else:
            self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.dim,) + self.grid.shape:
            raise ShapeError(
                f"vector field shape {self.values.shape} does not match grid "
                f"{(self.grid.dim,) + self.grid.shape}"
            )

    @classmethod
    def full(cls, grid: SpaceGrid, components) -> "VectorField":
        out = cls(grid)
        for d, c in enumerate(components):
            out.values[d].fill(float(c))
        return out

    def component(self, d: int) -> ScalarField:
        return ScalarField(self.grid, self.values[d].copy())

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.values.copy())


def _deriv(values: np.ndarray, grid: SpaceGrid, axis: int) -> np.ndarray:
    """Second-order first derivative of a sampled array along one axis."""
    dx = grid.spacing[axis]
    if grid.boundary == PERIODIC:
        return (np.roll(values, -1, axis) - np.roll(values, 1, axis)) / (2.0 * dx)
    # np.gradient: centered interior, one-sided second-order at the ends
    return np.gradient(values, dx, axis=axis, edge_order=2)


def _second_deriv(values: np.ndarray, grid: SpaceGrid, axis: int) -> np.ndarray:
    dx = grid.spacing[axis]
    up = np.roll(values, -1, axis)
    dn = np.roll(values, 1, axis)
    if grid.boundary == REFLECTIVE:
        # even-extension ghost across the cell-centered wall: ghost == edge value
        lo = [slice(None)] * values.ndim
        hi = [slice(None)] * values.ndim
        lo[axis] = 0
        hi[axis] = -1
        dn[tuple(lo)] = values[tuple(lo)]
        up[tuple(hi)] = values[tuple(hi)]
    return (up - 2.0 * values + dn) / (dx * dx)


def gradient(f: ScalarField) -> VectorField:
    grid = f.grid
    out = np.empty((grid.dim,) + grid.shape)
    for d in range(grid.dim):
        out[d] = _deriv(f.values, grid, d)
    _check_finite(out, "gradient")
    return VectorField(grid, out)


def divergence(v: VectorField) -> ScalarField:
    grid = v.grid
    out = np.zeros(grid.shape)
    for d in range(grid.dim):
        out += _deriv(v.values[d], grid, d)
    _check_finite(out, "divergence")
    return ScalarField(grid, out)


def laplacian(f: ScalarField) -> ScalarField:
    grid = f.grid
    out = np.zeros(grid.shape)
    for d in range(grid.dim):
        out += _second_deriv(f.values, grid, d)
    _check_finite(out, "laplacian")
    return ScalarField(grid, out)


def vector_laplacian(v: VectorField) -> VectorField:
    grid = v.grid
    out = np.zeros_like(v.values)
    for c in range(grid.dim):
        for d in range(grid.dim):
            out[c] += _second_deriv(v.values[c], grid, d)
    _check_finite(out, "vector laplacian")
    return VectorField(grid, out)


def curl(v: VectorField) -> VectorField:
    grid = v.grid
    if grid.dim != 3:
        raise ConfigError(f"operator 'rot_v' requires dim=3, grid has dim={grid.dim}")
    d = lambda c, ax: _deriv(v.values[c], grid, ax)
    out = np.empty_like(v.values)
    out[0] = d(2, 1) - d(1, 2)
    out[1] = d(0, 2) - d(2, 0)
    out[2] = d(1, 0) - d(0, 1)
    _check_finite(out, "curl")
    return VectorField(grid, out)
