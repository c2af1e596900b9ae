"""Strict readers for the riskwaves CSV file contracts.

Every reader validates the header against its contract; unknown columns are
an error, not ignored.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """An input file does not match its CSV contract."""


DISPERSION_HEADER = [
    "k",
    "re_w1", "im_w1", "re_w2", "im_w2", "re_w3", "im_w3", "re_w4", "im_w4",
    "regime", "c1_sq", "c2_sq", "gamma",
]

SCAN_MENU_HEADER = ["q1_kind", "q2_kind", "k", "a", "b", "disc", "regime", "gamma"]
SCAN_RANDOM_HEADER = [
    "alpha_i", "alpha_c", "beta_i", "beta_c", "u_i0", "u_c0",
    "a", "b", "disc", "regime", "gamma",
]

_COORD_RE = re.compile(r"^x[0-9]+$")
_DENSITY_RE = re.compile(r"^U_\w+$")
_VELOCITY_RE = re.compile(r"^v\w+_[0-9]+$")


def _read_lines(path):
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"{path}: no such file")
    text = path.read_text()
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    return header, rows


def _require_rows(path, rows):
    if not rows:
        raise SchemaError(f"{path}: header only, no data rows")


def read_series(path):
    """Macro series: `t` then one `*_total` column per fluid."""
    header, rows = _read_lines(path)
    if header[0] != "t":
        raise SchemaError(f"{path}: first column must be 't', got '{header[0]}'")
    for name in header[1:]:
        if not name.endswith("_total"):
            raise SchemaError(f"{path}: unknown column '{name}'")
    _require_rows(path, rows)
    data = np.array(rows, dtype=float)
    return data[:, 0], {name: data[:, i] for i, name in enumerate(header[1:], start=1)}


def read_index(path):
    """Trajectory index: `t,snapshot_path` rows; returns times and paths."""
    header, rows = _read_lines(path)
    if header != ["t", "snapshot_path"]:
        raise SchemaError(f"{path}: expected header t,snapshot_path, got {','.join(header)}")
    _require_rows(path, rows)
    base = Path(path).parent
    return np.array([float(r[0]) for r in rows]), [base / r[1] for r in rows]


def read_snapshot_1d(path):
    """One field snapshot on a 1D grid: x1 then density/velocity columns."""
    header, rows = _read_lines(path)
    if header[0] != "x1":
        raise SchemaError(f"{path}: first column must be 'x1', got '{header[0]}'")
    for name in header[1:]:
        if _COORD_RE.match(name):
            raise SchemaError(f"{path}: only 1D snapshots supported, found '{name}'")
        if not (_DENSITY_RE.match(name) or _VELOCITY_RE.match(name)):
            raise SchemaError(f"{path}: unknown column '{name}'")
    _require_rows(path, rows)
    data = np.array(rows, dtype=float)
    return data[:, 0], {name: data[:, i] for i, name in enumerate(header[1:], start=1)}


def read_dispersion(path):
    """Dispersion sweep rows keyed by column name; roots as complex arrays."""
    header, rows = _read_lines(path)
    if header != DISPERSION_HEADER:
        unknown = [c for c in header if c not in DISPERSION_HEADER]
        what = f"unknown column '{unknown[0]}'" if unknown else "column order mismatch"
        raise SchemaError(f"{path}: {what}")
    _require_rows(path, rows)
    k = np.array([float(r[0]) for r in rows])
    roots = np.array(
        [[float(r[1 + 2 * i]) + 1j * float(r[2 + 2 * i]) for i in range(4)] for r in rows]
    )
    regime = [r[9] for r in rows]
    c1_sq = np.array([float(r[10]) for r in rows])
    c2_sq = np.array([float(r[11]) for r in rows])
    gamma = np.array([float(r[12]) for r in rows])
    return {"k": k, "roots": roots, "regime": regime,
            "c1_sq": c1_sq, "c2_sq": c2_sq, "gamma": gamma}


def read_scan(path):
    """Regime scan rows (menu or random layout): a, b, regime per point."""
    header, rows = _read_lines(path)
    if header not in (SCAN_MENU_HEADER, SCAN_RANDOM_HEADER):
        known = set(SCAN_MENU_HEADER) | set(SCAN_RANDOM_HEADER)
        unknown = [c for c in header if c not in known]
        what = f"unknown column '{unknown[0]}'" if unknown else "column order mismatch"
        raise SchemaError(f"{path}: {what}")
    _require_rows(path, rows)
    ia, ib, ir = header.index("a"), header.index("b"), header.index("regime")
    a = np.array([float(r[ia]) for r in rows])
    b = np.array([float(r[ib]) for r in rows])
    regime = [r[ir] for r in rows]
    return a, b, regime
