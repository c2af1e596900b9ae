"""Linearized two-fluid system: dispersion roots, regimes, closed forms.

Small perturbations (q_I, q_C, v_I, v_C) about constant backgrounds obey a
constant-coefficient system whose plane-wave modes satisfy the even quartic

    w^4 - a k^2 w^2 + b k^4 = 0

with, in the general backgrounds case,

    a = alpha_C*beta_I/U_C0 + alpha_I*beta_C/U_I0
    b = beta_C*beta_I*(alpha_I*alpha_C/(U_I0*U_C0) - 1)

which reduces to a = alpha_I*beta_C + alpha_C*beta_I and
b = beta_C*beta_I*(alpha_I*alpha_C - 1) for unit backgrounds.

Regimes: a^2 > 4b with a, b > 0 gives two propagating wave families with
speeds c1^2, c2^2 = (a +- sqrt(a^2 - 4b))/2; a^2 < 4b gives oscillating
modes with an exponential envelope rate gamma.  A separate reporting
operation evaluates the published closed forms

    w^2 = k^2 (sqrt(4b + 3a^2) + 2a)/8,  gamma^2 = k^2 (sqrt(4b + 3a^2) - 2a)/8

verbatim next to the quartic-root values; the two derivations coincide only
at a^2 = 4b, so both are always emitted and never substituted for each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigError, NumericalError, ShapeError
from .espace import ScalarField, VectorField, divergence, gradient

TWO_REAL_SPEEDS = "two_real_speeds"
GROWING_MODES = "growing_modes"
DEGENERATE = "degenerate"

_RESIDUAL_TOL = 1e-9

Q1_KINDS = ("U", "dU_dt", "div_v", "lap_U")
Q2_KINDS = ("v", "dv_dt", "grad_U", "rot_v", "lap_v")


@dataclass(frozen=True)
class BiWaveCoeffs:
    a: float
    b: float
    general_form: bool  # True when backgrounds were folded in (U0 != 1)

    def __post_init__(self):
        if not np.isfinite(self.a) or not np.isfinite(self.b):
            raise NumericalError("nonfinite bi-wave coefficients")


def biwave_coeffs(p) -> BiWaveCoeffs:
    """Characteristic coefficients of the two-fluid perturbation system."""
    a = p.alpha_C * p.beta_I / p.U_C0 + p.alpha_I * p.beta_C / p.U_I0
    b = p.beta_C * p.beta_I * (p.alpha_I * p.alpha_C / (p.U_I0 * p.U_C0) - 1.0)
    general = not (p.U_I0 == 1.0 and p.U_C0 == 1.0)
    if not general:
        # unit backgrounds must reproduce the normalized formulas exactly
        a_norm = p.alpha_I * p.beta_C + p.alpha_C * p.beta_I
        b_norm = p.beta_C * p.beta_I * (p.alpha_I * p.alpha_C - 1.0)
        if a != a_norm or b != b_norm:
            raise NumericalError("normalized coefficient reduction failed")
    return BiWaveCoeffs(a=float(a), b=float(b), general_form=general)


@dataclass(frozen=True)
class DispersionResult:
    k: float
    roots: tuple[complex, complex, complex, complex]
    regime: str
    c1_sq: float | None
    c2_sq: float | None
    gamma: float


def classify(a: float, b: float) -> str:
    """Regime from the signs of (a, b, a^2 - 4b) alone."""
    disc = a * a - 4.0 * b
    if disc < 0.0:
        return GROWING_MODES
    if disc > 0.0 and a > 0.0 and b > 0.0:
        return TWO_REAL_SPEEDS
    return DEGENERATE


def _quartic_residual(w: complex, a: float, b: float, k: float) -> float:
    return abs(w**4 - a * k * k * w * w + b * k**4)


def dispersion(coeffs: BiWaveCoeffs, k: float) -> DispersionResult:
    """Solve w^4 - a k^2 w^2 + b k^4 = 0 and classify the regime."""
    if k == 0.0:
        raise ConfigError("dispersion requires k != 0")
    a, b = coeffs.a, coeffs.b
    disc = complex(a * a - 4.0 * b)
    sq = np.sqrt(disc)
    w2 = (k * k) * np.array([(a + sq) / 2.0, (a - sq) / 2.0], dtype=complex)
    roots = []
    for v in w2:
        r = np.sqrt(v)
        roots.extend([complex(r), complex(-r)])
    for w in roots:
        if _quartic_residual(w, a, b, k) >= _RESIDUAL_TOL * max(1.0, abs(w) ** 4):
            raise NumericalError(f"dispersion root residual too large at w={w}")
    regime = classify(a, b)
    c1_sq = c2_sq = None
    gamma = 0.0
    if regime == TWO_REAL_SPEEDS:
        c1_sq = float(np.real(w2[0])) / (k * k)
        c2_sq = float(np.real(w2[1])) / (k * k)
    elif regime == GROWING_MODES:
        gamma = max(w.imag for w in roots)
    return DispersionResult(
        k=float(k), roots=tuple(roots), regime=regime, c1_sq=c1_sq, c2_sq=c2_sq, gamma=gamma
    )


@dataclass(frozen=True)
class GrowthComparison:
    """Published closed-form growth values next to the quartic-root values."""

    closed_omega_sq: float
    closed_gamma_sq: float
    root_omega_sq: float
    root_gamma_sq: float

    @property
    def discrepancy(self) -> float:
        return max(
            abs(self.closed_omega_sq - self.root_omega_sq),
            abs(self.closed_gamma_sq - self.root_gamma_sq),
        )


def closed_form_growth(a: float, b: float, k: float) -> GrowthComparison:
    if a * a >= 4.0 * b:
        raise ConfigError(f"closed-form growth values need a^2 < 4b, got a={a:g}, b={b:g}")
    s = np.sqrt(4.0 * b + 3.0 * a * a)
    closed_omega_sq = k * k * (s + 2.0 * a) / 8.0
    closed_gamma_sq = k * k * (s - 2.0 * a) / 8.0
    res = dispersion(BiWaveCoeffs(a=a, b=b, general_form=False), k)
    w = max(res.roots, key=lambda z: (z.imag, z.real))  # growing branch, Re >= 0
    if w.real < 0:
        w = -w.conjugate()
    return GrowthComparison(
        closed_omega_sq=float(closed_omega_sq),
        closed_gamma_sq=float(closed_gamma_sq),
        root_omega_sq=float(w.real**2),
        root_gamma_sq=float(w.imag**2),
    )


# -- linearized right-hand side --------------------------------------------


def linear_rhs(qI: ScalarField, qC: ScalarField, vI: VectorField, vC: VectorField, p):
    """Constant-coefficient perturbation derivatives (no advection)."""
    grid = qI.grid
    for f in (qC, vI, vC):
        if f.grid != grid:
            raise ShapeError("perturbation fields live on different grids")
    div_vI = divergence(vI)
    div_vC = divergence(vC)
    dqI = ScalarField(grid, -p.U_I0 * div_vI.values + p.alpha_C * div_vC.values)
    dqC = ScalarField(grid, -p.U_C0 * div_vC.values + p.alpha_I * div_vI.values)
    dvI = VectorField(grid, (p.beta_C / p.U_I0) * gradient(qC).values)
    dvC = VectorField(grid, (p.beta_I / p.U_C0) * gradient(qI).values)
    return dqI, dqC, dvI, dvC


@dataclass(frozen=True)
class PlaneWaveMode:
    """Complex plane-wave eigenmode amplitudes, q_I normalized to 1."""

    omega: complex
    q_I: complex
    q_C: complex
    v_I: complex
    v_C: complex


def eigenmode(p, k: float, branch: str) -> PlaneWaveMode:
    """Eigenmode of the 1D perturbation system for one root branch.

    branch: 'c1' / 'c2' select the fast / slow propagating family (positive
    frequency); 'grow' / 'decay' select the complex branches when a^2 < 4b.
    """
    coeffs = biwave_coeffs(p)
    res = dispersion(coeffs, k)
    a, b = coeffs.a, coeffs.b
    sq = np.sqrt(complex(a * a - 4.0 * b))
    w2_fast = (k * k) * (a + sq) / 2.0
    w2_slow = (k * k) * (a - sq) / 2.0
    if branch == "c1":
        omega = np.sqrt(w2_fast)
    elif branch == "c2":
        omega = np.sqrt(w2_slow)
    elif branch in ("grow", "decay"):
        if res.regime != GROWING_MODES:
            raise ConfigError(f"branch {branch!r} needs the growing regime (a^2 < 4b)")
        omega = np.sqrt(w2_fast)
        if (omega.imag > 0) != (branch == "grow"):
            omega = np.sqrt(w2_slow)
        if omega.real < 0:
            omega = -omega.conjugate()
    else:
        raise ConfigError(f"unknown branch {branch!r}; use c1, c2, grow or decay")
    A = 1.0 + 0.0j
    B = (k * k * (p.alpha_C * p.beta_I / p.U_C0) - omega * omega) * A / (k * k * p.beta_C)
    V = -(p.beta_C / p.U_I0) * (k / omega) * B
    W = -(p.beta_I / p.U_C0) * (k / omega) * A
    return PlaneWaveMode(omega=complex(omega), q_I=A, q_C=complex(B), v_I=complex(V), v_C=complex(W))


# -- generic single-term operator-pair analysis -----------------------------


@dataclass(frozen=True)
class MenuDispersion:
    q1_kind: str
    q2_kind: str
    k: float
    omegas: tuple[complex, ...]
    regime: str
    a: float | None  # present when the characteristic quartic is even
    b: float | None
    gamma: float


def menu_dispersion(
    q1_kind: str,
    q2_kind: str,
    k: float,
    coeff1: float = 1.0,
    coeff2: float = 1.0,
    u_i0: float = 1.0,
    u_c0: float = 1.0,
) -> MenuDispersion:
    """Longitudinal plane-wave analysis of one Q1 x Q2 operator pairing.

    Both fluids source each other with the same operator kind and
    coefficient.  State vector (q_I, q_C, v_I, v_C); rot_v contributes
    nothing to longitudinal 1D modes.
    """
    if q1_kind not in Q1_KINDS:
        raise ConfigError(f"unknown Q1 operator {q1_kind!r}; choose from {Q1_KINDS}")
    if q2_kind not in Q2_KINDS:
        raise ConfigError(f"unknown Q2 operator {q2_kind!r}; choose from {Q2_KINDS}")
    if k == 0.0:
        raise ConfigError("menu dispersion requires k != 0")
    ik = 1j * k
    # A dy/dt = B y
    A = np.eye(4, dtype=complex)
    A[2, 2] = u_i0
    A[3, 3] = u_c0
    B = np.zeros((4, 4), dtype=complex)
    B[0, 2] = -u_i0 * ik
    B[1, 3] = -u_c0 * ik
    qcol = {"I": 0, "C": 1}
    vcol = {"I": 2, "C": 3}
    for row, src in ((0, "C"), (1, "I")):
        if q1_kind == "U":
            B[row, qcol[src]] += coeff1
        elif q1_kind == "dU_dt":
            A[row, qcol[src]] -= coeff1
        elif q1_kind == "div_v":
            B[row, vcol[src]] += coeff1 * ik
        elif q1_kind == "lap_U":
            B[row, qcol[src]] += -coeff1 * k * k
    for row, src in ((2, "C"), (3, "I")):
        if q2_kind == "v":
            B[row, vcol[src]] += coeff2
        elif q2_kind == "dv_dt":
            A[row, vcol[src]] -= coeff2
        elif q2_kind == "grad_U":
            B[row, qcol[src]] += coeff2 * ik
        elif q2_kind == "lap_v":
            B[row, vcol[src]] += -coeff2 * k * k
        # rot_v: zero for longitudinal modes
    # generalized eigenproblem B y = lambda A y; a singular A (possible for
    # unit-coefficient time-derivative couplings) yields infinite eigenvalues
    # and is classified as degenerate rather than raised
    lam = scipy.linalg.eigvals(B, A)
    finite = np.isfinite(lam)
    if not np.all(finite):
        omegas = np.full(lam.shape, np.nan + 0j)
        omegas[finite] = 1j * lam[finite]
        return MenuDispersion(
            q1_kind=q1_kind, q2_kind=q2_kind, k=float(k),
            omegas=tuple(complex(w) for w in omegas),
            regime=DEGENERATE, a=None, b=None, gamma=0.0,
        )
    omegas = 1j * lam  # modes evolve as exp(-i w t)
    scale = max(1.0, float(np.max(np.abs(omegas))))
    tol = 1e-9 * scale
    gamma = float(np.max(omegas.imag))
    if gamma > tol:
        regime = GROWING_MODES
    else:
        gamma = 0.0
        mags = np.sort(np.abs(omegas.real))
        nonzero = mags[mags > tol]
        pairs = {round(float(m) / scale, 9) for m in nonzero}
        regime = TWO_REAL_SPEEDS if len(pairs) == 2 and len(nonzero) == 4 else DEGENERATE
    # even-quartic coefficients when odd powers vanish
    poly = np.poly(omegas)
    a = b = None
    if abs(poly[1]) <= tol and abs(poly[3]) <= tol * scale**3:
        if abs(poly[2].imag) <= tol * scale and abs(poly[4].imag) <= tol * scale**3:
            a = float(-poly[2].real) / (k * k)
            b = float(poly[4].real) / k**4
    return MenuDispersion(
        q1_kind=q1_kind,
        q2_kind=q2_kind,
        k=float(k),
        omegas=tuple(complex(w) for w in omegas),
        regime=regime,
        a=a,
        b=b,
        gamma=gamma,
    )


# -- frequency / growth measurement -----------------------------------------


@dataclass(frozen=True)
class MeasuredMode:
    omega: float | None
    gamma: float | None


def mode_measurement(times, values) -> MeasuredMode:
    """Extract frequency and envelope growth rate from a mode time series.

    Frequency comes from the discrete-Fourier peak of the Hann-windowed,
    mean-subtracted series with parabolic interpolation; the growth rate is
    the least-squares slope of log|envelope|.  Needs >= 16 uniform samples
    covering at least one oscillation period.  A flat signal yields absent
    measurements, not zeros.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values)
    if t.ndim != 1 or y.shape != t.shape:
        raise ShapeError("times and values must be matching 1D arrays")
    if t.size < 16:
        raise ConfigError(f"need at least 16 samples, got {t.size}")
    dt = np.diff(t)
    if np.any(dt <= 0) or not np.allclose(dt, dt[0], rtol=1e-9):
        raise ConfigError("samples must be uniformly spaced and increasing")
    dt = float(dt[0])
    y_raw = y
    y = y - np.mean(y)
    scale = float(np.max(np.abs(y)))
    if scale < 1e-300 or np.ptp(np.abs(y)) < 1e-13 * max(scale, 1.0) and scale < 1e-13:
        return MeasuredMode(omega=None, gamma=None)

    n = y.size
    win = np.hanning(n)
    spec = np.fft.fft(y * win)
    freqs = np.fft.fftfreq(n, d=dt)
    mag = np.abs(spec)
    i = int(np.argmax(mag))
    if mag[i] == 0.0:
        return MeasuredMode(omega=None, gamma=None)
    # parabolic interpolation on log-magnitude around the peak bin
    im, ip = (i - 1) % n, (i + 1) % n
    lm, l0, lp = (np.log(max(mag[j], 1e-300)) for j in (im, i, ip))
    denom = lm - 2.0 * l0 + lp
    delta = 0.0 if denom == 0.0 else 0.5 * (lm - lp) / denom
    delta = float(np.clip(delta, -0.5, 0.5))
    f_peak = abs(freqs[i] + delta / (n * dt))
    omega = 2.0 * np.pi * f_peak
    if omega == 0.0:
        return MeasuredMode(omega=None, gamma=None)

    # envelope from the raw series: mean subtraction would fold the late-time
    # amplitude back into the early samples and bias the slope
    if np.iscomplexobj(y_raw):
        env_t, env = t, np.abs(y_raw)
    else:
        # real signal: the oscillation peaks trace the envelope
        a = np.abs(y_raw)
        peaks = np.flatnonzero((a[1:-1] > a[:-2]) & (a[1:-1] >= a[2:])) + 1
        env_t, env = t[peaks], a[peaks]
    keep = env > 1e-300
    if np.count_nonzero(keep) < 4:
        return MeasuredMode(omega=float(omega), gamma=None)
    slope = float(np.polyfit(env_t[keep], np.log(env[keep]), 1)[0])
    return MeasuredMode(omega=float(omega), gamma=slope)
