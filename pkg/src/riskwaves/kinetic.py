"""Agent ensembles and their deposition onto density/impulse fields.

Agents carry coordinates (risk grades), drift velocities, and a vector of
additive economic variables.  Aggregation is nearest-cell histogram
deposition in strict particle order, normalized by cell volume so that a
field quadrature recovers the plain sum of agent variables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError
from .espace import ScalarField, SpaceGrid, VectorField

DEFAULT_FLOOR_SCALE = 1e-12


@dataclass(frozen=True)
class EParticle:
    coords: tuple[float, ...]
    velocity: tuple[float, ...]
    vars: tuple[float, ...]


class AgentEnsemble:
    """Immutable collection of agents living on one grid.

    coords: (N, dim), velocities: (N, dim), values: (N, l).
    """

    def __init__(self, grid: SpaceGrid, coords, velocities, values, var_names, seed: int = 0):
        self.grid = grid
        self.coords = np.atleast_2d(np.asarray(coords, dtype=float))
        self.velocities = np.atleast_2d(np.asarray(velocities, dtype=float))
        self.values = np.atleast_2d(np.asarray(values, dtype=float))
        self.var_names = tuple(str(n) for n in var_names)
        self.seed = int(seed)
        if self.coords.size == 0:
            self.coords = self.coords.reshape(0, grid.dim)
            self.velocities = self.velocities.reshape(0, grid.dim)
            self.values = self.values.reshape(0, len(self.var_names))
        n = self.coords.shape[0]
        if self.coords.shape != (n, grid.dim):
            raise ShapeError(f"coords shape {self.coords.shape} != ({n}, {grid.dim})")
        if self.velocities.shape != (n, grid.dim):
            raise ShapeError(f"velocities shape {self.velocities.shape} != ({n}, {grid.dim})")
        if self.values.shape != (n, len(self.var_names)):
            raise ShapeError(
                f"values shape {self.values.shape} != ({n}, {len(self.var_names)})"
            )
        for d in range(grid.dim):
            lo = self.coords[:, d].min(initial=0.0)
            hi = self.coords[:, d].max(initial=0.0)
            if lo < 0.0 or hi > grid.extent[d]:
                raise ConfigError(
                    f"particle coordinate out of range on axis {d}: "
                    f"[{lo:g}, {hi:g}] not within [0, {grid.extent[d]:g}]"
                )
        for arr in (self.coords, self.velocities, self.values):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return self.coords.shape[0]

    @property
    def num_vars(self) -> int:
        return len(self.var_names)

    def particle(self, i: int) -> EParticle:
        return EParticle(
            tuple(self.coords[i]), tuple(self.velocities[i]), tuple(self.values[i])
        )

    @classmethod
    def from_particles(cls, grid, particles, var_names, seed=0) -> "AgentEnsemble":
        coords = [p.coords for p in particles]
        vels = [p.velocity for p in particles]
        vals = [p.vars for p in particles]
        if not particles:
            coords = np.zeros((0, grid.dim))
            vels = np.zeros((0, grid.dim))
            vals = np.zeros((0, len(var_names)))
        return cls(grid, coords, vels, vals, var_names, seed)

    def concat(self, other: "AgentEnsemble") -> "AgentEnsemble":
        if other.grid != self.grid or other.var_names != self.var_names:
            raise ConfigError("cannot concatenate ensembles with different grid or variables")
        return AgentEnsemble(
            self.grid,
            np.vstack([self.coords, other.coords]),
            np.vstack([self.velocities, other.velocities]),
            np.vstack([self.values, other.values]),
            self.var_names,
            self.seed,
        )


def cell_indices(ens: AgentEnsemble) -> np.ndarray:
    """Flat cell index per particle (row-major over axes, axis order preserved)."""
    grid = ens.grid
    idx = np.empty((len(ens), grid.dim), dtype=np.intp)
    for d in range(grid.dim):
        j = np.floor(ens.coords[:, d] / grid.spacing[d]).astype(np.intp)
        np.clip(j, 0, grid.cells[d] - 1, out=j)  # x == X lands in the last cell
        idx[:, d] = j
    return np.ravel_multi_index(idx.T, grid.cells) if len(ens) else np.empty(0, dtype=np.intp)


def _deposit(ens: AgentEnsemble, weights: np.ndarray) -> np.ndarray:
    """Accumulate per-particle weights into cells in particle order."""
    flat = np.zeros(ens.grid.num_points)
    if len(ens):
        # np.add.at is unbuffered: repeated indices accumulate in array order,
        # matching a sequential loop over particles bit for bit
        np.add.at(flat, cell_indices(ens), weights)
    return flat.reshape(ens.grid.shape)


def _check_var_index(ens: AgentEnsemble, j: int) -> None:
    if not 0 <= j < ens.num_vars:
        raise ConfigError(f"variable index {j} out of range [0, {ens.num_vars})")


def aggregate_density(ens: AgentEnsemble, j: int) -> ScalarField:
    """Per-cell sum of variable j divided by cell volume."""
    _check_var_index(ens, j)
    w = ens.values[:, j] if len(ens) else np.empty(0)
    return ScalarField(ens.grid, _deposit(ens, w) / ens.grid.cell_volume)


def aggregate_impulse(ens: AgentEnsemble, j: int) -> VectorField:
    """Per-cell sum of u_j * velocity divided by cell volume."""
    _check_var_index(ens, j)
    out = VectorField(ens.grid)
    for d in range(ens.grid.dim):
        w = ens.values[:, j] * ens.velocities[:, d] if len(ens) else np.empty(0)
        out.values[d] = _deposit(ens, w) / ens.grid.cell_volume
    return out


def default_floor(U: ScalarField) -> float:
    peak = float(np.max(np.abs(U.values))) if U.values.size else 0.0
    return DEFAULT_FLOOR_SCALE * (peak if peak > 0.0 else 1.0)


def velocity_from_impulse(
    U: ScalarField, P: VectorField, floor: float | None = None
) -> tuple[VectorField, int]:
    """Recover the drift field v = P/U; cells with |U| < floor get v = 0.

    Returns the field and the count of floored cells.
    """
    if U.grid != P.grid:
        raise ShapeError("density and impulse live on different grids")
    if floor is None:
        floor = default_floor(U)
    if floor <= 0.0:
        raise ConfigError(f"floor must be positive, got {floor:g}")
    ok = np.abs(U.values) >= floor
    out = VectorField(U.grid)
    for d in range(U.grid.dim):
        np.divide(P.values[d], U.values, out=out.values[d], where=ok)
    floored = int(U.values.size - np.count_nonzero(ok))
    return out, floored


def ensemble_moment(ens: AgentEnsemble, j: int, m: int) -> float:
    """Moment m of the per-cell density aggregate, averaged over cells."""
    if m < 1:
        raise ConfigError(f"moment order must be >= 1, got {m}")
    U = aggregate_density(ens, j)
    return float(np.mean(U.values**m))


def ensemble_correlation(ens: AgentEnsemble, j: int, i: int) -> float:
    """Mean over cells of the product of two per-cell density aggregates."""
    Uj = aggregate_density(ens, j)
    Ui = aggregate_density(ens, i)
    return float(np.mean(Uj.values * Ui.values))


# -- synthetic ensembles ----------------------------------------------------

_VAR_DISTS = ("constant", "uniform", "normal")


def generate_ensemble(grid: SpaceGrid, count: int, seed: int, spec: dict) -> AgentEnsemble:
    """Reproducible synthetic ensemble.

    spec keys:
      coords:   'uniform' (default)
      velocity: {'dist': 'normal', 'scale': s} or {'dist': 'zero'}
      vars:     list of {'name', 'dist', ...params} with dist in
                constant(value) | uniform(low, high) | normal(mean, std)
    """
    if count < 0:
        raise ConfigError(f"count must be >= 0, got {count}")
    coords_kind = spec.get("coords", "uniform")
    if coords_kind != "uniform":
        raise ConfigError(f"unknown coords distribution {coords_kind!r} (key 'coords')")
    vel = spec.get("velocity", {"dist": "zero"})
    if vel.get("dist") not in ("zero", "normal"):
        raise ConfigError(f"unknown velocity distribution {vel.get('dist')!r} (key 'velocity')")
    var_specs = spec.get("vars", [])
    if not isinstance(var_specs, list) or not var_specs:
        raise ConfigError("spec must list at least one variable (key 'vars')")
    for vs in var_specs:
        if "name" not in vs:
            raise ConfigError("variable spec missing key 'name'")
        if vs.get("dist") not in _VAR_DISTS:
            raise ConfigError(
                f"unknown distribution {vs.get('dist')!r} for variable {vs['name']!r} (key 'dist')"
            )

    rng = np.random.default_rng(seed)
    coords = rng.uniform(0.0, 1.0, size=(count, grid.dim)) * np.asarray(grid.extent)
    if vel["dist"] == "normal":
        velocities = rng.normal(0.0, float(vel.get("scale", 1.0)), size=(count, grid.dim))
    else:
        velocities = np.zeros((count, grid.dim))
    cols = []
    for vs in var_specs:
        if vs["dist"] == "constant":
            cols.append(np.full(count, float(vs.get("value", 1.0))))
        elif vs["dist"] == "uniform":
            cols.append(rng.uniform(float(vs.get("low", 0.0)), float(vs.get("high", 1.0)), count))
        else:
            cols.append(rng.normal(float(vs.get("mean", 0.0)), float(vs.get("std", 1.0)), count))
    values = np.column_stack(cols) if count else np.zeros((0, len(var_specs)))
    names = [vs["name"] for vs in var_specs]
    return AgentEnsemble(grid, coords, velocities, values, names, seed)
