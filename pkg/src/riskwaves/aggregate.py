"""Domain integration of density fields and macro time series.

The whole-economy value of a variable is the integral of its density over
the coordinate box.  Periodic grids use the rectangle rule (exact for full
wavelengths); reflective grids store cell centers, so the same cell-volume
weighted sum is the midpoint rule, second order like the trapezoid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .espace import ScalarField
from .linear import MeasuredMode, mode_measurement


def integrate_density(U: ScalarField) -> float:
    """Quadrature of a density field over the full domain."""
    return float(U.grid.cell_volume * np.sum(U.values))


def analytic_aggregate(k: float, omega: float, X: float, t: float) -> float:
    """Closed-form integral of cos(k x - omega t) over [0, X]."""
    if k == 0.0:
        raise ConfigError("analytic aggregate requires k != 0")
    return (2.0 / k) * np.sin(0.5 * k * X) * np.cos(0.5 * k * X - omega * t)


@dataclass
class MacroTimeSeries:
    times: np.ndarray
    totals: dict[str, np.ndarray]  # fluid name -> aggregate total per time

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ConfigError("times must be strictly increasing")
        for name, vals in self.totals.items():
            self.totals[name] = np.asarray(vals, dtype=float)
            if self.totals[name].shape != self.times.shape:
                raise ConfigError(f"series {name!r} length does not match times")


def macro_series(trajectory) -> MacroTimeSeries:
    """Integrate every snapshot of a trajectory into per-fluid totals."""
    if len(trajectory.snapshots) < 1:
        raise ConfigError("trajectory holds no snapshots")
    names = list(trajectory.snapshots[0])
    totals = {
        name: np.array([integrate_density(s[name].U) for s in trajectory.snapshots])
        for name in names
    }
    return MacroTimeSeries(times=np.asarray(trajectory.times), totals=totals)


def dominant_frequency(series: MacroTimeSeries, name: str | None = None) -> MeasuredMode:
    """Dominant oscillation frequency of one mean-subtracted total."""
    if name is None:
        name = next(iter(series.totals))
    vals = series.totals[name]
    if vals.size < 16:
        return MeasuredMode(omega=None, gamma=None)
    return mode_measurement(series.times, vals - np.mean(vals))
