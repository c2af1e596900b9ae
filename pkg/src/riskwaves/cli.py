"""Batch command-line front end.

Commands: simulate, disperse, scan, aggregate, agents.  Configuration files
are plain INI key/value sections, echoed verbatim into the run manifest.
Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import aggregate as agg
from . import csvio, hydro, kinetic, linear
from .errors import ConfigError, NumericalError
from .espace import PERIODIC, ScalarField, SpaceGrid, VectorField

VERSION = "0.1.0"


# -- configuration -----------------------------------------------------------


def _get(section, key, cast=str, default=None, cfgname=""):
    if key not in section:
        if default is not None:
            return default
        raise ConfigError(f"missing key '{cfgname}.{key}'")
    raw = section[key]
    try:
        return cast(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for key '{cfgname}.{key}': {raw!r}") from exc


def _floats(raw: str) -> tuple[float, ...]:
    return tuple(float(x) for x in raw.replace(",", " ").split())


def _ints(raw: str) -> tuple[int, ...]:
    return tuple(int(x) for x in raw.replace(",", " ").split())


@dataclass
class SimConfig:
    grid: SpaceGrid
    model_type: str
    params: hydro.ConjugateParams | None
    terms: list[hydro.OperatorTerm]
    init_mode: str
    branch: str
    k: float
    k_warning: str | None
    amplitude: float
    width: float
    init_path: str | None
    seed: int
    dt: float | None
    cfl_fraction: float
    t_end: float
    snap_stride: int
    raw_text: str


def parse_sim_config(path) -> SimConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    raw_text = path.read_text()
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.read_string(raw_text)
    for sec in ("space", "model", "init", "run"):
        if sec not in cp:
            raise ConfigError(f"missing section [{sec}]")

    sp = cp["space"]
    grid = SpaceGrid(
        dim=_get(sp, "dim", int, cfgname="space"),
        extent=_get(sp, "extent", _floats, cfgname="space"),
        cells=_get(sp, "cells", _ints, cfgname="space"),
        boundary=_get(sp, "boundary", str, default=PERIODIC, cfgname="space"),
    )

    md = cp["model"]
    model_type = _get(md, "type", str, default="conjugate", cfgname="model")
    params = None
    terms: list[hydro.OperatorTerm] = []
    if model_type == "conjugate":
        params = hydro.ConjugateParams(
            alpha_I=_get(md, "alpha_i", float, cfgname="model"),
            alpha_C=_get(md, "alpha_c", float, cfgname="model"),
            beta_I=_get(md, "beta_i", float, cfgname="model"),
            beta_C=_get(md, "beta_c", float, cfgname="model"),
            U_I0=_get(md, "u_i0", float, default=1.0, cfgname="model"),
            U_C0=_get(md, "u_c0", float, default=1.0, cfgname="model"),
        )
    elif model_type == "generic":
        for key in sorted(k for k in md if k.startswith("term")):
            parts = md[key].split()
            if len(parts) != 5:
                raise ConfigError(
                    f"key 'model.{key}' must read: <fluid> <Q1|Q2> <kind> <coeff> <source>"
                )
            terms.append(
                hydro.OperatorTerm(
                    fluid=parts[0], target=parts[1], kind=parts[2],
                    coefficient=float(parts[3]), source=parts[4],
                )
            )
        if not terms:
            raise ConfigError("generic model needs at least one 'model.termN' key")
    else:
        raise ConfigError(f"unknown value for key 'model.type': {model_type!r}")

    it = cp["init"]
    init_mode = _get(it, "mode", str, cfgname="init")
    if init_mode not in ("plane_wave", "gaussian_bump", "from_file"):
        raise ConfigError(f"unknown value for key 'init.mode': {init_mode!r}")
    branch = _get(it, "branch", str, default="c1", cfgname="init")
    amplitude = _get(it, "amplitude", float, default=1e-4, cfgname="init")
    width = _get(it, "width", float, default=0.1, cfgname="init")
    seed = _get(it, "seed", int, default=0, cfgname="init")
    init_path = it.get("path")
    k = 0.0
    k_warning = None
    if init_mode == "plane_wave":
        X = grid.extent[0]
        if "k_mode" in it:
            m = _get(it, "k_mode", int, cfgname="init")
            if m < 1:
                raise ConfigError("key 'init.k_mode' must be >= 1")
            k = 2.0 * np.pi * m / X
        else:
            k = _get(it, "k", float, cfgname="init")
            if grid.boundary == PERIODIC:
                m = max(1, round(k * X / (2.0 * np.pi)))
                k_snapped = 2.0 * np.pi * m / X
                if abs(k_snapped - k) > 1e-12 * max(1.0, abs(k)):
                    k_warning = (
                        f"init.k={k:g} is not an admissible periodic mode; "
                        f"snapped to 2*pi*{m}/X = {k_snapped:.17g}"
                    )
                k = k_snapped
    if init_mode == "from_file" and not init_path:
        raise ConfigError("missing key 'init.path' for from_file mode")

    rn = cp["run"]
    dt_raw = _get(rn, "dt", str, default="auto", cfgname="run")
    dt = None if dt_raw == "auto" else float(dt_raw)
    if dt is not None and dt <= 0:
        raise ConfigError(f"key 'run.dt' must be positive, got {dt:g}")
    cfl_fraction = _get(rn, "cfl_fraction", float, default=0.8, cfgname="run")
    if not 0 < cfl_fraction <= 1:
        raise ConfigError("key 'run.cfl_fraction' must lie in (0, 1]")
    t_end = _get(rn, "t_end", float, cfgname="run")
    if t_end <= 0:
        raise ConfigError("key 'run.t_end' must be positive")
    snap_stride = _get(rn, "snap_stride", int, default=1, cfgname="run")
    if snap_stride < 1:
        raise ConfigError("key 'run.snap_stride' must be >= 1")

    return SimConfig(
        grid=grid, model_type=model_type, params=params, terms=terms,
        init_mode=init_mode, branch=branch, k=k, k_warning=k_warning,
        amplitude=amplitude, width=width, init_path=init_path, seed=seed,
        dt=dt, cfl_fraction=cfl_fraction, t_end=t_end, snap_stride=snap_stride,
        raw_text=raw_text,
    )


# -- initial states ----------------------------------------------------------


def build_initial_states(cfg: SimConfig) -> dict[str, hydro.FluidState]:
    grid = cfg.grid
    if cfg.model_type == "conjugate":
        u_i0, u_c0 = cfg.params.U_I0, cfg.params.U_C0
    else:
        u_i0 = u_c0 = 1.0
    x1 = grid.meshgrid()[0]

    def fluid(name, u0, q, v1):
        U = ScalarField(grid, np.full(grid.shape, u0) + q)
        v = VectorField(grid)
        v.values[0] = v1
        return hydro.FluidState(name, U, v)

    if cfg.init_mode == "plane_wave":
        if cfg.params is None:
            raise ConfigError("plane_wave init needs the conjugate model")
        mode = linear.eigenmode(cfg.params, cfg.k, cfg.branch)
        phase = np.exp(1j * cfg.k * x1)
        a = cfg.amplitude
        return {
            "I": fluid("I", u_i0, a * np.real(mode.q_I * phase), a * np.real(mode.v_I * phase)),
            "C": fluid("C", u_c0, a * np.real(mode.q_C * phase), a * np.real(mode.v_C * phase)),
        }
    if cfg.init_mode == "gaussian_bump":
        sigma = cfg.width * grid.extent[0]
        bump = cfg.amplitude * np.exp(-((x1 - 0.5 * grid.extent[0]) ** 2) / (2.0 * sigma**2))
        return {
            "I": fluid("I", u_i0, bump, np.zeros(grid.shape)),
            "C": fluid("C", u_c0, np.zeros(grid.shape), np.zeros(grid.shape)),
        }
    # from_file
    cols = csvio.read_field_csv(cfg.init_path, grid)
    needed = ["U_I", "vI_1", "U_C", "vC_1"]
    for c in needed:
        if c not in cols:
            raise ConfigError(f"init file {cfg.init_path} misses column {c!r}")
    return {
        "I": fluid("I", 0.0, cols["U_I"], cols["vI_1"]),
        "C": fluid("C", 0.0, cols["U_C"], cols["vC_1"]),
    }


def linear_speed_estimate(cfg: SimConfig) -> float:
    if cfg.params is None:
        return 0.0
    res = linear.dispersion(linear.biwave_coeffs(cfg.params), k=1.0)
    return max(abs(w) for w in res.roots)


# -- commands ----------------------------------------------------------------


def snapshot_columns(states: dict[str, hydro.FluidState]):
    cols = []
    for name in states:
        s = states[name]
        cols.extend(csvio.scalar_columns(f"U_{name}", s.U))
        cols.extend(csvio.vector_columns(f"v{name}", s.v))
    return cols


def cmd_simulate(cfg_path, out_dir) -> int:
    cfg = parse_sim_config(cfg_path)
    if cfg.k_warning:
        print(f"warning: {cfg.k_warning}", file=sys.stderr)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    states = build_initial_states(cfg)
    c_lin = linear_speed_estimate(cfg)
    if cfg.model_type == "conjugate":
        rhs = lambda s: hydro.conjugate_rhs(s["I"], s["C"], cfg.params)
    else:
        spec = hydro.RhsSpec(cfg.terms)
        rhs = lambda s: hydro.generic_rhs(s, spec)
    if cfg.dt is None:
        bound = hydro.cfl_bound(states, c_lin)
        if not np.isfinite(bound):
            raise ConfigError("cannot choose dt automatically for a motionless state; set run.dt")
        dt = cfg.cfl_fraction * bound
    else:
        dt = cfg.dt
    n_steps = max(1, int(np.ceil(cfg.t_end / dt)))
    dt = cfg.t_end / n_steps
    traj = hydro.simulate(states, rhs, dt, n_steps, cfg.snap_stride, c_lin)

    snap_dir = out / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    index_rows = []
    for i, (t, snap) in enumerate(zip(traj.times, traj.snapshots)):
        rel = f"snapshots/snap_{i:06d}.csv"
        csvio.write_field_csv(out / rel, cfg.grid, snapshot_columns(snap))
        index_rows.append((t, rel))
    csvio.write_rows(out / "index.csv", ["t", "snapshot_path"], index_rows)

    series = agg.macro_series(traj)
    names = list(series.totals)
    csvio.write_rows(
        out / "series.csv",
        ["t"] + [f"U_{n}_total" for n in names],
        zip(series.times, *[series.totals[n] for n in names]),
    )

    with open(out / "run_manifest.txt", "w", newline="\n") as fh:
        fh.write(f"riskwaves {VERSION}\n")
        fh.write(f"dt={dt:.17g} n_steps={n_steps}\n")
        fh.write(f"floored_cells={traj.diagnostics['floored_cells']}\n")
        fh.write(f"negative_cells={traj.diagnostics['negative_cells']}\n")
        if cfg.k_warning:
            fh.write(f"warning: {cfg.k_warning}\n")
        fh.write("--- config ---\n")
        fh.write(cfg.raw_text)
    return 0


DISPERSION_HEADER = [
    "k",
    "re_w1", "im_w1", "re_w2", "im_w2", "re_w3", "im_w3", "re_w4", "im_w4",
    "regime", "c1_sq", "c2_sq", "gamma",
]


def dispersion_row(res: linear.DispersionResult):
    row = [res.k]
    for w in res.roots:
        row.extend([w.real, w.imag])
    row.append(res.regime)
    row.extend([
        res.c1_sq if res.c1_sq is not None else float("nan"),
        res.c2_sq if res.c2_sq is not None else float("nan"),
        res.gamma,
    ])
    return row


def cmd_disperse(args) -> int:
    p = hydro.ConjugateParams(
        alpha_I=args.alpha_i, alpha_C=args.alpha_c,
        beta_I=args.beta_i, beta_C=args.beta_c,
        U_I0=args.ui0, U_C0=args.uc0,
    )
    coeffs = linear.biwave_coeffs(p)
    if args.k_steps < 1:
        raise ConfigError("--k-steps must be >= 1")
    ks = np.linspace(args.k_min, args.k_max, args.k_steps)
    if np.any(ks == 0):
        raise ConfigError("k range must not contain 0")
    rows = [dispersion_row(linear.dispersion(coeffs, k)) for k in ks]
    csvio.write_rows(args.output, DISPERSION_HEADER, rows)
    return 0


def _scan_random_point(sample):
    aI, aC, bI, bC, ui0, uc0 = sample
    p = hydro.ConjugateParams(alpha_I=aI, alpha_C=aC, beta_I=bI, beta_C=bC, U_I0=ui0, U_C0=uc0)
    c = linear.biwave_coeffs(p)
    res = linear.dispersion(c, 1.0)
    disc = c.a * c.a - 4.0 * c.b
    return (aI, aC, bI, bC, ui0, uc0, c.a, c.b, disc, res.regime, res.gamma)


def _scan_menu_point(pair):
    q1, q2, k = pair
    res = linear.menu_dispersion(q1, q2, k)
    a = res.a if res.a is not None else float("nan")
    b = res.b if res.b is not None else float("nan")
    disc = a * a - 4.0 * b if res.a is not None and res.b is not None else float("nan")
    return (q1, q2, k, a, b, disc, res.regime, res.gamma)


def cmd_scan(cfg_path, out_path) -> int:
    path = Path(cfg_path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.read_string(path.read_text())
    if "scan" not in cp:
        raise ConfigError("missing section [scan]")
    sc = cp["scan"]
    mode = _get(sc, "mode", str, cfgname="scan")
    k = _get(sc, "k", float, default=1.0, cfgname="scan")
    if mode == "menu":
        pairs = [(q1, q2, k) for q1 in linear.Q1_KINDS for q2 in linear.Q2_KINDS]
        with ThreadPoolExecutor() as ex:
            rows = list(ex.map(_scan_menu_point, pairs))
        csvio.write_rows(
            out_path,
            ["q1_kind", "q2_kind", "k", "a", "b", "disc", "regime", "gamma"],
            rows,
        )
        return 0
    if mode == "random":
        n = _get(sc, "samples", int, cfgname="scan")
        seed = _get(sc, "seed", int, default=0, cfgname="scan")
        lo, hi = _get(sc, "alpha_range", _floats, default=(0.01, 10.0), cfgname="scan")
        blo, bhi = _get(sc, "beta_range", _floats, default=(0.01, 10.0), cfgname="scan")
        rng = np.random.default_rng(seed)
        samples = [
            (
                rng.uniform(lo, hi), rng.uniform(lo, hi),
                rng.uniform(blo, bhi), -rng.uniform(blo, bhi),
                1.0, 1.0,
            )
            for _ in range(n)
        ]
        with ThreadPoolExecutor() as ex:
            rows = list(ex.map(_scan_random_point, samples))
        csvio.write_rows(
            out_path,
            ["alpha_i", "alpha_c", "beta_i", "beta_c", "u_i0", "u_c0",
             "a", "b", "disc", "regime", "gamma"],
            rows,
        )
        return 0
    raise ConfigError(f"unknown value for key 'scan.mode': {mode!r}")


def infer_grid_from_field_csv(path) -> SpaceGrid:
    """Reconstruct the grid from a snapshot's coordinate columns."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    dim = sum(1 for h in header if h in ("x1", "x2", "x3"))
    if dim == 0:
        raise ConfigError(f"{path}: no coordinate columns found")
    cells, extent = [], []
    first = None
    for d in range(dim):
        u = np.unique(data[:, d])
        if len(u) < 2:
            raise ConfigError(f"{path}: axis {d + 1} holds a single coordinate")
        dx = u[1] - u[0]
        cells.append(len(u))
        extent.append(dx * len(u))
        if first is None:
            first = u[0]
    boundary = PERIODIC if abs(first) < 1e-12 else "reflective"
    return SpaceGrid(dim=dim, extent=tuple(extent), cells=tuple(cells), boundary=boundary)


def cmd_aggregate(index_path, out_path) -> int:
    index_path = Path(index_path)
    if not index_path.is_file():
        raise ConfigError(f"index file not found: {index_path}")
    with open(index_path) as fh:
        header = fh.readline().strip().split(",")
        if header != ["t", "snapshot_path"]:
            raise ConfigError(f"{index_path}: expected header t,snapshot_path")
        entries = [line.strip().split(",") for line in fh if line.strip()]
    if not entries:
        raise ConfigError(f"{index_path}: no snapshots listed")
    base = index_path.parent
    grid = infer_grid_from_field_csv(base / entries[0][1])
    times, totals = [], {}
    for t_raw, rel in entries:
        cols = csvio.read_field_csv(base / rel, grid)
        times.append(float(t_raw))
        for name, vals in cols.items():
            if name.startswith("U_"):
                totals.setdefault(name, []).append(
                    agg.integrate_density(ScalarField(grid, vals))
                )
    names = list(totals)
    csvio.write_rows(
        out_path,
        ["t"] + [f"{n}_total" for n in names],
        zip(times, *[totals[n] for n in names]),
    )
    return 0


def cmd_agents(args) -> int:
    spec_path = Path(args.spec)
    if not spec_path.is_file():
        raise ConfigError(f"spec file not found: {spec_path}")
    try:
        spec = json.loads(spec_path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"spec file is not valid JSON: {exc}") from exc
    gspec = spec.get("grid")
    if not isinstance(gspec, dict):
        raise ConfigError("spec missing object key 'grid'")
    grid = SpaceGrid(
        dim=int(gspec.get("dim", 1)),
        extent=tuple(gspec.get("extent", (1.0,))),
        cells=tuple(gspec.get("cells", (16,))) if isinstance(gspec.get("cells"), (list, tuple))
        else (int(gspec.get("cells", 16)),) * int(gspec.get("dim", 1)),
        boundary=gspec.get("boundary", PERIODIC),
    )
    ens = kinetic.generate_ensemble(grid, args.count, args.seed, spec)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    csvio.write_ensemble_csv(out / "ensemble.csv", ens)
    for j, name in enumerate(ens.var_names):
        U = kinetic.aggregate_density(ens, j)
        P = kinetic.aggregate_impulse(ens, j)
        csvio.write_field_csv(out / f"density_{name}.csv", grid, csvio.scalar_columns(name, U))
        csvio.write_field_csv(out / f"impulse_{name}.csv", grid, csvio.vector_columns(name, P))
    return 0


# -- entry point -------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="riskwaves", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a configured simulation")
    p.add_argument("config")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("disperse", help="sweep the dispersion relation over k")
    p.add_argument("--alpha-i", type=float, required=True)
    p.add_argument("--alpha-c", type=float, required=True)
    p.add_argument("--beta-i", type=float, required=True)
    p.add_argument("--beta-c", type=float, required=True)
    p.add_argument("--ui0", type=float, default=1.0)
    p.add_argument("--uc0", type=float, default=1.0)
    p.add_argument("--k-min", type=float, required=True)
    p.add_argument("--k-max", type=float, required=True)
    p.add_argument("--k-steps", type=int, required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("scan", help="classify regimes over a parameter or operator grid")
    p.add_argument("config")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("aggregate", help="integrate a trajectory into macro series")
    p.add_argument("index")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("agents", help="generate an ensemble and aggregate it to fields")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("-o", "--output", required=True)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate":
        return cmd_simulate(args.config, args.output)
    if args.command == "disperse":
        return cmd_disperse(args)
    if args.command == "scan":
        return cmd_scan(args.config, args.output)
    if args.command == "aggregate":
        return cmd_aggregate(args.index, args.output)
    if args.command == "agents":
        return cmd_agents(args)
    raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    try:
        return run(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
