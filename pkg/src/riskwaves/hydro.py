"""Nonlinear time integration of coupled conjugate-fluid equations.

Each fluid carries a density U and a drift field v.  Continuity is
integrated in divergence (flux) form so the total density is conserved
exactly up to time-integration error when all source terms vanish on a
periodic grid; the motion equation is divided through by U with a floor.

Source terms couple a fluid only to its conjugates, never to itself.  The
generic assembly accepts the full single-operator menu (four scalar kinds
for the continuity side, five vector kinds for the motion side); time-
derivative kinds make the coupling implicit and are resolved exactly by a
small per-point linear solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CflError, ConfigError, NumericalError, ShapeError
from .espace import (
    ScalarField,
    SpaceGrid,
    VectorField,
    curl,
    divergence,
    gradient,
    laplacian,
    vector_laplacian,
)
from .kinetic import default_floor
from .linear import Q1_KINDS, Q2_KINDS

CFL_SAFETY = 0.5


@dataclass
class FluidState:
    name: str
    U: ScalarField
    v: VectorField

    def __post_init__(self):
        if self.U.grid != self.v.grid:
            raise ShapeError(f"fluid {self.name!r}: density and velocity grids differ")

    @property
    def grid(self) -> SpaceGrid:
        return self.U.grid

    def copy(self) -> "FluidState":
        return FluidState(self.name, self.U.copy(), self.v.copy())


@dataclass(frozen=True)
class ConjugateParams:
    alpha_I: float
    alpha_C: float
    beta_I: float
    beta_C: float
    U_I0: float = 1.0
    U_C0: float = 1.0

    def __post_init__(self):
        if self.alpha_I <= 0:
            raise ConfigError(f"alpha_I must be > 0, got {self.alpha_I:g}")
        if self.alpha_C <= 0:
            raise ConfigError(f"alpha_C must be > 0, got {self.alpha_C:g}")
        if self.beta_I <= 0:
            raise ConfigError(f"beta_I must be > 0, got {self.beta_I:g}")
        if self.beta_C >= 0:
            raise ConfigError(f"beta_C must be < 0, got {self.beta_C:g}")
        if self.U_I0 <= 0 or self.U_C0 <= 0:
            raise ConfigError("background densities must be positive")


@dataclass(frozen=True)
class InterestRateInputs:
    ir: ScalarField
    U_F: ScalarField

    def __post_init__(self):
        if self.ir.grid != self.U_F.grid:
            raise ShapeError("rate and funds fields live on different grids")
        if np.any(self.U_F.values < 0):
            raise ConfigError("funds field must be nonnegative")


def cost_of_investment(inputs: InterestRateInputs) -> ScalarField:
    """Extensive proxy for the rate: pointwise rate times funds."""
    return ScalarField(inputs.ir.grid, inputs.ir.values * inputs.U_F.values)


@dataclass(frozen=True)
class OperatorTerm:
    fluid: str  # target fluid
    target: str  # "Q1" (continuity) or "Q2" (motion)
    kind: str
    coefficient: float
    source: str  # conjugate fluid supplying the operand


@dataclass
class RhsSpec:
    terms: list[OperatorTerm] = field(default_factory=list)

    def validate(self, names: list[str], dim: int) -> None:
        for t in self.terms:
            if t.fluid not in names:
                raise ConfigError(f"term targets unknown fluid {t.fluid!r}")
            if t.source not in names:
                raise ConfigError(f"term sources unknown fluid {t.source!r}")
            if t.source == t.fluid:
                raise ConfigError(
                    f"fluid {t.fluid!r} may not source itself (term kind {t.kind!r})"
                )
            if t.target == "Q1":
                if t.kind not in Q1_KINDS:
                    raise ConfigError(f"unknown Q1 operator {t.kind!r}; choose from {Q1_KINDS}")
            elif t.target == "Q2":
                if t.kind not in Q2_KINDS:
                    raise ConfigError(f"unknown Q2 operator {t.kind!r}; choose from {Q2_KINDS}")
                if t.kind == "rot_v" and dim != 3:
                    raise ConfigError("operator 'rot_v' requires a dim-3 grid")
            else:
                raise ConfigError(f"term target must be Q1 or Q2, got {t.target!r}")


@dataclass
class RhsResult:
    dU: dict[str, ScalarField]
    dv: dict[str, VectorField]
    floored_cells: int = 0


def _advection(v: VectorField) -> np.ndarray:
    """(v . grad) v, one array per component."""
    grid = v.grid
    out = np.zeros_like(v.values)
    for c in range(grid.dim):
        g = gradient(ScalarField(grid, v.values[c]))
        for d in range(grid.dim):
            out[c] += v.values[d] * g.values[d]
    return out


def _guarded_inverse(U: ScalarField, floor: float | None) -> tuple[np.ndarray, int]:
    if floor is None:
        floor = default_floor(U)
    ok = np.abs(U.values) >= floor
    inv = np.zeros_like(U.values)
    np.divide(1.0, U.values, out=inv, where=ok)
    return inv, int(U.values.size - np.count_nonzero(ok))


def _check_rhs_finite(name: str, what: str, arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise NumericalError(
            f"nonfinite {what} derivative for fluid {name!r} at index "
            f"{tuple(int(i) for i in bad)}"
        )


def conjugate_rhs(I: FluidState, C: FluidState, p: ConjugateParams, floor=None) -> RhsResult:
    """Time derivatives of the Demand-on-Investment / Cost-of-Investment pair."""
    grid = I.grid
    if C.grid != grid:
        raise ShapeError("conjugate fluids live on different grids")
    div_vI = divergence(I.v)
    div_vC = divergence(C.v)
    dU_I = -divergence(VectorField(grid, I.v.values * I.U.values)).values + p.alpha_C * div_vC.values
    dU_C = -divergence(VectorField(grid, C.v.values * C.U.values)).values + p.alpha_I * div_vI.values
    inv_UI, n1 = _guarded_inverse(I.U, floor)
    inv_UC, n2 = _guarded_inverse(C.U, floor)
    dv_I = -_advection(I.v) + p.beta_C * inv_UI * gradient(C.U).values
    dv_C = -_advection(C.v) + p.beta_I * inv_UC * gradient(I.U).values
    for name, dU, dv in ((I.name, dU_I, dv_I), (C.name, dU_C, dv_C)):
        _check_rhs_finite(name, "density", dU)
        _check_rhs_finite(name, "velocity", dv)
    return RhsResult(
        dU={I.name: ScalarField(grid, dU_I), C.name: ScalarField(grid, dU_C)},
        dv={I.name: VectorField(grid, dv_I), C.name: VectorField(grid, dv_C)},
        floored_cells=n1 + n2,
    )


def generic_rhs(states: dict[str, FluidState], spec: RhsSpec, floor=None) -> RhsResult:
    """Assemble derivatives for an arbitrary operator-menu specification.

    dU_dt / dv_dt source kinds couple the fluids' time derivatives; the
    coupling is solved exactly at every grid point.
    """
    names = list(states)
    if not names:
        raise ConfigError("no fluids supplied")
    grid = next(iter(states.values())).grid
    for s in states.values():
        if s.grid != grid:
            raise ShapeError("fluids live on different grids")
    spec.validate(names, grid.dim)
    n = len(names)
    pos = {name: i for i, name in enumerate(names)}
    shape = grid.shape

    floored = 0
    inv_U = {}
    for name, s in states.items():
        inv, cnt = _guarded_inverse(s.U, floor)
        inv_U[name] = inv
        floored += cnt

    # explicit parts
    expl_U = {name: -divergence(VectorField(grid, s.v.values * s.U.values)).values
              for name, s in states.items()}
    expl_v = {name: -_advection(s.v) for name, s in states.items()}

    # scalar coupling: dU_i = expl_U_i + sum_j S[i,j] dU_j  (S constant)
    S = np.zeros((n, n))
    # vector coupling: dv_i = expl_v_i + sum_j (c/U_i) dv_j  (pointwise)
    V = np.zeros(shape + (n, n))

    for t in spec.terms:
        src = states[t.source]
        c = t.coefficient
        if t.target == "Q1":
            if t.kind == "U":
                expl_U[t.fluid] += c * src.U.values
            elif t.kind == "div_v":
                expl_U[t.fluid] += c * divergence(src.v).values
            elif t.kind == "lap_U":
                expl_U[t.fluid] += c * laplacian(src.U).values
            elif t.kind == "dU_dt":
                S[pos[t.fluid], pos[t.source]] += c
        else:
            scale = inv_U[t.fluid]
            if t.kind == "v":
                expl_v[t.fluid] += c * scale * src.v.values
            elif t.kind == "grad_U":
                expl_v[t.fluid] += c * scale * gradient(src.U).values
            elif t.kind == "rot_v":
                expl_v[t.fluid] += c * scale * curl(src.v).values
            elif t.kind == "lap_v":
                expl_v[t.fluid] += c * scale * vector_laplacian(src.v).values
            elif t.kind == "dv_dt":
                V[..., pos[t.fluid], pos[t.source]] += c * scale

    dU_arr = _solve_coupling_constant(S, expl_U, names, shape)
    dv_arr = _solve_coupling_pointwise(V, expl_v, names, shape, grid.dim)

    result = RhsResult(dU={}, dv={}, floored_cells=floored)
    for name in names:
        _check_rhs_finite(name, "density", dU_arr[name])
        _check_rhs_finite(name, "velocity", dv_arr[name])
        result.dU[name] = ScalarField(grid, dU_arr[name])
        result.dv[name] = VectorField(grid, dv_arr[name])
    return result


def _solve_coupling_constant(S, expl, names, shape):
    n = len(names)
    if not S.any():
        return dict(expl)
    A = np.eye(n) - S
    if abs(np.linalg.det(A)) < 1e-12:
        raise ConfigError(
            f"singular implicit density coupling; coefficients {S[S != 0].tolist()}"
        )
    inv = np.linalg.inv(A)
    stacked = np.stack([expl[name] for name in names])  # (n, *shape)
    solved = np.tensordot(inv, stacked, axes=(1, 0))
    return {name: solved[i] for i, name in enumerate(names)}


def _solve_coupling_pointwise(V, expl, names, shape, dim):
    n = len(names)
    if not V.any():
        return dict(expl)
    A = np.broadcast_to(np.eye(n), shape + (n, n)) - V
    det = np.linalg.det(A)
    if np.any(np.abs(det) < 1e-12):
        raise NumericalError(
            "singular implicit velocity coupling at some grid point; "
            f"coefficients {V[V != 0].tolist()[:4]}"
        )
    out = {name: np.empty((dim,) + shape) for name in names}
    for d in range(dim):
        rhs = np.stack([expl[name][d] for name in names], axis=-1)[..., None]  # (*shape, n, 1)
        sol = np.linalg.solve(A, rhs)[..., 0]
        for i, name in enumerate(names):
            out[name][d] = sol[..., i]
    return out


# -- time integration --------------------------------------------------------


def cfl_bound(states: dict[str, FluidState], linear_speed: float = 0.0) -> float:
    """Largest admissible dt: CFL_SAFETY * min(dx) / max wave-speed estimate."""
    grid = next(iter(states.values())).grid
    vmax = max(
        (float(np.max(np.abs(s.v.values))) for s in states.values()), default=0.0
    )
    speed = max(vmax, abs(linear_speed))
    if speed == 0.0:
        return float("inf")
    return CFL_SAFETY * min(grid.spacing) / speed


def _axpy(states, base, rhs: RhsResult, h: float) -> dict[str, FluidState]:
    out = {}
    for name, s in base.items():
        U = ScalarField(s.grid, s.U.values + h * rhs.dU[name].values)
        v = VectorField(s.grid, s.v.values + h * rhs.dv[name].values)
        out[name] = FluidState(name, U, v)
    return out


def step(states: dict[str, FluidState], rhs_func, dt: float, linear_speed: float = 0.0):
    """One classic fixed-step RK4 stage over all fluids.

    rhs_func(states) -> RhsResult.  Returns (new_states, diagnostics dict).
    """
    if dt <= 0:
        raise ConfigError(f"dt must be positive, got {dt:g}")
    bound = cfl_bound(states, linear_speed)
    if dt > bound:
        raise CflError(dt, bound)
    k1 = rhs_func(states)
    k2 = rhs_func(_axpy(states, states, k1, dt / 2.0))
    k3 = rhs_func(_axpy(states, states, k2, dt / 2.0))
    k4 = rhs_func(_axpy(states, states, k3, dt))
    out = {}
    floored = k1.floored_cells + k2.floored_cells + k3.floored_cells + k4.floored_cells
    negative = 0
    for name, s in states.items():
        dU = (k1.dU[name].values + 2 * k2.dU[name].values + 2 * k3.dU[name].values
              + k4.dU[name].values) / 6.0
        dv = (k1.dv[name].values + 2 * k2.dv[name].values + 2 * k3.dv[name].values
              + k4.dv[name].values) / 6.0
        U = ScalarField(s.grid, s.U.values + dt * dU)
        v = VectorField(s.grid, s.v.values + dt * dv)
        if not (np.all(np.isfinite(U.values)) and np.all(np.isfinite(v.values))):
            raise NumericalError(f"nonfinite state for fluid {name!r} after step")
        negative += int(np.count_nonzero(U.values < 0))
        out[name] = FluidState(name, U, v)
    return out, {"floored_cells": floored, "negative_cells": negative}


@dataclass
class Trajectory:
    times: list[float]
    snapshots: list[dict[str, FluidState]]
    diagnostics: dict


def simulate(
    states: dict[str, FluidState],
    rhs_func,
    dt: float,
    n_steps: int,
    snap_stride: int = 1,
    linear_speed: float = 0.0,
) -> Trajectory:
    """Fixed-step RK4 run emitting snapshots every snap_stride steps."""
    if n_steps < 0:
        raise ConfigError("n_steps must be >= 0")
    if snap_stride < 1:
        raise ConfigError("snap_stride must be >= 1")
    times = [0.0]
    snaps = [{n: s.copy() for n, s in states.items()}]
    totals = {"floored_cells": 0, "negative_cells": 0}
    current = states
    for i in range(n_steps):
        try:
            current, diag = step(current, rhs_func, dt, linear_speed)
        except NumericalError as exc:
            raise NumericalError(f"step {i}: {exc}") from exc
        totals["floored_cells"] += diag["floored_cells"]
        totals["negative_cells"] += diag["negative_cells"]
        if (i + 1) % snap_stride == 0 or i + 1 == n_steps:
            times.append((i + 1) * dt)
            snaps.append({n: s.copy() for n, s in current.items()})
    return Trajectory(times=times, snapshots=snaps, diagnostics=totals)
