import numpy as np
import pytest

from riskwaves.errors import ConfigError
from riskwaves.espace import ScalarField, SpaceGrid, VectorField
from riskwaves.hydro import ConjugateParams
from riskwaves.linear import (
    DEGENERATE,
    GROWING_MODES,
    Q1_KINDS,
    Q2_KINDS,
    TWO_REAL_SPEEDS,
    BiWaveCoeffs,
    biwave_coeffs,
    classify,
    dispersion,
    eigenmode,
    linear_rhs,
    menu_dispersion,
    mode_measurement,
    closed_form_growth,
)

WAVE_PARAMS = ConjugateParams(alpha_I=0.1, alpha_C=0.5, beta_I=10.0, beta_C=-0.1)
GROW_PARAMS = ConjugateParams(alpha_I=0.1, alpha_C=0.5, beta_I=4.0, beta_C=-1.0)


def quartic_roots_oracle(a, b, k):
    """Brute-force polynomial root oracle for w^4 - a k^2 w^2 + b k^4."""
    return np.roots([1.0, 0.0, -a * k * k, 0.0, b * k**4])


class TestBiWaveCoeffs:
    def test_degenerate_cancellation(self):
        p = ConjugateParams(alpha_I=1.0, alpha_C=1.0, beta_I=1.0, beta_C=-1.0)
        c = biwave_coeffs(p)
        assert c.a == 0.0 and c.b == 0.0

    def test_wave_parameter_set(self):
        c = biwave_coeffs(WAVE_PARAMS)
        assert c.a == pytest.approx(4.99, abs=1e-14)
        assert c.b == pytest.approx(0.95, abs=1e-14)
        assert c.a**2 > 4 * c.b
        assert not c.general_form

    def test_growing_parameter_set(self):
        c = biwave_coeffs(GROW_PARAMS)
        assert c.a == pytest.approx(1.9, abs=1e-14)
        assert c.b == pytest.approx(3.8, abs=1e-14)
        assert c.a**2 < 4 * c.b

    def test_general_form_with_backgrounds(self):
        p = ConjugateParams(alpha_I=0.1, alpha_C=0.5, beta_I=10.0, beta_C=-0.1,
                            U_I0=2.0, U_C0=0.5)
        c = biwave_coeffs(p)
        assert c.general_form
        assert c.a == pytest.approx(0.5 * 10.0 / 0.5 + 0.1 * -0.1 / 2.0)
        assert c.b == pytest.approx(-0.1 * 10.0 * (0.1 * 0.5 / 1.0 - 1.0))


class TestDispersion:
    def test_integer_quadratic(self):
        res = dispersion(BiWaveCoeffs(a=5.0, b=4.0, general_form=False), k=1.0)
        assert res.regime == TWO_REAL_SPEEDS
        assert res.c1_sq == pytest.approx(4.0)
        assert res.c2_sq == pytest.approx(1.0)
        mags = sorted(abs(w) for w in res.roots)
        assert mags == pytest.approx([1.0, 1.0, 2.0, 2.0])

    def test_wave_set_speeds(self):
        res = dispersion(biwave_coeffs(WAVE_PARAMS), k=1.0)
        # frozen from the quadratic formula, cross-checked by np.roots below
        assert res.c1_sq == pytest.approx(4.791742258069025, rel=1e-12)
        assert res.c2_sq == pytest.approx(0.19825774193097567, rel=1e-12)
        oracle = sorted(np.abs(quartic_roots_oracle(4.99, 0.95, 1.0)))
        assert sorted(np.abs(res.roots)) == pytest.approx(oracle, rel=1e-10)

    def test_growing_set_complex_roots(self):
        res = dispersion(biwave_coeffs(GROW_PARAMS), k=2.0)
        assert res.regime == GROWING_MODES
        assert all(abs(w.imag) > 0 for w in res.roots)
        assert res.gamma == pytest.approx(2.0 * 0.7068800707905807, rel=1e-9)

    def test_k_zero_rejected(self):
        with pytest.raises(ConfigError):
            dispersion(BiWaveCoeffs(a=1.0, b=1.0, general_form=False), 0.0)

    def test_root_residuals(self):
        for a, b in [(4.99, 0.95), (1.9, 3.8), (-1.0, 2.0), (3.0, -1.0)]:
            res = dispersion(BiWaveCoeffs(a=a, b=b, general_form=False), k=1.7)
            for w in res.roots:
                r = abs(w**4 - a * res.k**2 * w**2 + b * res.k**4)
                assert r < 1e-9 * max(1.0, abs(w) ** 4)

    def test_vieta_identities(self):
        res = dispersion(biwave_coeffs(WAVE_PARAMS), k=3.0)
        assert res.c1_sq * res.c2_sq == pytest.approx(0.95, rel=1e-12)
        assert res.c1_sq + res.c2_sq == pytest.approx(4.99, rel=1e-12)

    def test_roots_scale_linearly_in_k(self):
        c = biwave_coeffs(GROW_PARAMS)
        r1 = np.sort_complex(np.asarray(dispersion(c, 1.3).roots))
        r2 = np.sort_complex(np.asarray(dispersion(c, 2.6).roots))
        assert np.allclose(r2, 2.0 * r1, rtol=1e-12)

    def test_negative_b_is_degenerate(self):
        res = dispersion(BiWaveCoeffs(a=3.0, b=-1.0, general_form=False), 1.0)
        assert res.regime == DEGENERATE


class TestClassify:
    def test_sign_analysis_matches_dispersion(self):
        rng = np.random.default_rng(0)
        for _ in range(500):
            a = rng.uniform(-5, 5)
            b = rng.uniform(-5, 5)
            res = dispersion(BiWaveCoeffs(a=a, b=b, general_form=False), 1.0)
            assert res.regime == classify(a, b)


class TestPaperGrowthFormulas:
    def test_reference_point(self):
        # a=0, b=1, k=1: closed forms give 0.25/0.25, quartic roots give 0.5/0.5
        cmp = closed_form_growth(0.0, 1.0, 1.0)
        assert cmp.closed_omega_sq == pytest.approx(0.25)
        assert cmp.closed_gamma_sq == pytest.approx(0.25)
        assert cmp.root_omega_sq == pytest.approx(0.5)
        assert cmp.root_gamma_sq == pytest.approx(0.5)
        assert cmp.discrepancy == pytest.approx(0.25)
        # cross-check the root side against the brute-force polynomial oracle
        w = max(quartic_roots_oracle(0.0, 1.0, 1.0), key=lambda z: (z.imag, z.real))
        assert cmp.root_gamma_sq == pytest.approx(w.imag**2, rel=1e-9)
        assert cmp.root_omega_sq == pytest.approx(w.real**2, rel=1e-9)

    def test_boundary_coincidence(self):
        # approaching a^2 = 4b from inside the growing regime both derivations
        # converge to omega^2 = a k^2 / 2, gamma = 0
        a = 2.0
        b = (a * a / 4.0) * (1.0 + 1e-9)
        cmp = closed_form_growth(a, b, 1.0)
        assert cmp.closed_omega_sq == pytest.approx(a / 2.0, rel=1e-4)
        assert cmp.root_omega_sq == pytest.approx(a / 2.0, rel=1e-4)
        assert cmp.closed_gamma_sq == pytest.approx(0.0, abs=1e-4)
        assert cmp.root_gamma_sq == pytest.approx(0.0, abs=1e-4)
        assert cmp.discrepancy < 1e-4
        # just outside the regime the closed forms are refused
        with pytest.raises(ConfigError):
            closed_form_growth(a, (a * a / 4.0) * (1.0 - 1e-9), 1.0)

    def test_growing_set_comparison_row(self):
        cmp = closed_form_growth(1.9, 3.8, 2.0)
        w = max(quartic_roots_oracle(1.9, 3.8, 2.0), key=lambda z: (z.imag, z.real))
        assert cmp.root_omega_sq == pytest.approx(w.real**2, rel=1e-9)
        assert cmp.root_gamma_sq == pytest.approx(w.imag**2, rel=1e-9)
        s = np.sqrt(4 * 3.8 + 3 * 1.9**2)
        assert cmp.closed_omega_sq == pytest.approx(4.0 * (s + 3.8) / 8.0)
        assert cmp.closed_gamma_sq == pytest.approx(4.0 * (s - 3.8) / 8.0)
        assert cmp.discrepancy > 0


def make_fields(grid):
    return (
        ScalarField(grid),
        ScalarField(grid),
        VectorField(grid),
        VectorField(grid),
    )


class TestLinearRhs:
    def test_zero_fields_zero_derivatives(self):
        g = SpaceGrid(dim=1, extent=(1.0,), cells=(32,))
        dqI, dqC, dvI, dvC = linear_rhs(*make_fields(g), WAVE_PARAMS)
        for f in (dqI, dqC):
            assert np.all(f.values == 0.0)
        for f in (dvI, dvC):
            assert np.all(f.values == 0.0)

    def test_single_active_term(self):
        X = 2 * np.pi
        g = SpaceGrid(dim=1, extent=(X,), cells=(256,))
        k = 1.0
        x = g.axis_coords(0)
        qI, qC, vI, vC = make_fields(g)
        qC.values[:] = np.sin(k * x)
        p = WAVE_PARAMS
        dqI, dqC, dvI, dvC = linear_rhs(qI, qC, vI, vC, p)
        assert np.all(dqI.values == 0.0)
        assert np.all(dqC.values == 0.0)
        assert np.all(dvC.values == 0.0)
        expect = (p.beta_C / p.U_I0) * k * np.cos(k * x)
        assert np.max(np.abs(dvI.values[0] - expect)) < 1e-3 * np.max(np.abs(expect))

    def test_eigenmode_one_period(self):
        """RK4 over one period returns the mode scaled by exp(-i w T)."""
        X = 2 * np.pi
        g = SpaceGrid(dim=1, extent=(X,), cells=(512,))
        k = 1.0
        p = WAVE_PARAMS
        mode = eigenmode(p, k, "c1")
        omega = mode.omega.real
        x = g.axis_coords(0)
        phase = np.exp(1j * k * x)
        amp = 1e-6
        y = [
            amp * np.real(mode.q_I * phase),
            amp * np.real(mode.q_C * phase),
            amp * np.real(mode.v_I * phase),
            amp * np.real(mode.v_C * phase),
        ]

        def rhs(y):
            qI = ScalarField(g, y[0])
            qC = ScalarField(g, y[1])
            vI = VectorField(g, y[2][None])
            vC = VectorField(g, y[3][None])
            dqI, dqC, dvI, dvC = linear_rhs(qI, qC, vI, vC, p)
            return [dqI.values, dqC.values, dvI.values[0], dvC.values[0]]

        T = 2 * np.pi / omega
        n = 2000
        dt = T / n
        for _ in range(n):
            k1 = rhs(y)
            k2 = rhs([a + dt / 2 * b for a, b in zip(y, k1)])
            k3 = rhs([a + dt / 2 * b for a, b in zip(y, k2)])
            k4 = rhs([a + dt * b for a, b in zip(y, k3)])
            y = [a + dt / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
                 for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)]
        expect = amp * np.real(mode.q_I * phase)  # exp(-i w T) = 1 after a full period
        err = np.max(np.abs(y[0] - expect)) / amp
        assert err < 1e-3

    def test_shape_mismatch_rejected(self):
        g1 = SpaceGrid(dim=1, extent=(1.0,), cells=(32,))
        g2 = SpaceGrid(dim=1, extent=(1.0,), cells=(16,))
        with pytest.raises(Exception):
            linear_rhs(ScalarField(g1), ScalarField(g2), VectorField(g1), VectorField(g1),
                       WAVE_PARAMS)


class TestEigenmode:
    def test_mode_satisfies_linear_system(self):
        for branch in ("c1", "c2"):
            m = eigenmode(WAVE_PARAMS, 2.0, branch)
            p, k, w = WAVE_PARAMS, 2.0, m.omega
            # plane-wave residuals of the four linearized equations
            r1 = -1j * w * m.q_I + p.U_I0 * 1j * k * m.v_I - p.alpha_C * 1j * k * m.v_C
            r2 = -1j * w * m.q_C + p.U_C0 * 1j * k * m.v_C - p.alpha_I * 1j * k * m.v_I
            r3 = -1j * w * m.v_I - (p.beta_C / p.U_I0) * 1j * k * m.q_C
            r4 = -1j * w * m.v_C - (p.beta_I / p.U_C0) * 1j * k * m.q_I
            for r in (r1, r2, r3, r4):
                assert abs(r) < 1e-12 * max(1.0, abs(w))

    def test_growing_branch_has_positive_imag(self):
        m = eigenmode(GROW_PARAMS, 1.0, "grow")
        assert m.omega.imag > 0
        d = eigenmode(GROW_PARAMS, 1.0, "decay")
        assert d.omega.imag < 0

    def test_grow_branch_requires_regime(self):
        with pytest.raises(ConfigError):
            eigenmode(WAVE_PARAMS, 1.0, "grow")


class TestMenuDispersion:
    def test_all_twenty_pairings_run(self):
        for q1 in Q1_KINDS:
            for q2 in Q2_KINDS:
                res = menu_dispersion(q1, q2, k=1.0)
                assert len(res.omegas) == 4
                assert res.regime in (TWO_REAL_SPEEDS, GROWING_MODES, DEGENERATE)

    def test_div_grad_pairing_matches_conjugate_model(self):
        # unit-coefficient div_v / grad_U pairing: alpha_I=alpha_C=beta_I=1
        # with beta_C=+1 is outside the sign constraints, but the quartic
        # structure must still be even with a = 2, b = 0 for unit coefficients
        res = menu_dispersion("div_v", "grad_U", k=1.0)
        assert res.a == pytest.approx(2.0, abs=1e-9)
        assert res.b == pytest.approx(0.0, abs=1e-9)

    def test_bad_kind_rejected(self):
        with pytest.raises(ConfigError, match="Q1"):
            menu_dispersion("grad_U", "v", 1.0)

    def test_signed_coefficients(self):
        sym = menu_dispersion("div_v", "grad_U", k=2.0, coeff1=1.0, coeff2=-1.0)
        # alpha=1, beta=-1 both ways: a = -2, b = 0 -> no propagating pair
        assert sym.a == pytest.approx(-2.0, abs=1e-9)
        assert sym.regime != TWO_REAL_SPEEDS


class TestModeMeasurement:
    def test_pure_cosine(self):
        w = 3.7
        t = np.linspace(0, 12 * 2 * np.pi / w, 600)
        m = mode_measurement(t, np.cos(w * t))
        assert m.omega == pytest.approx(w, rel=5e-3)

    def test_growing_cosine(self):
        w, g = 2.0, 0.3
        t = np.linspace(0, 10 * 2 * np.pi / w, 800)
        m = mode_measurement(t, np.exp(g * t) * np.cos(w * t))
        assert m.omega == pytest.approx(w, rel=1e-2)
        assert m.gamma == pytest.approx(g, rel=1e-2)

    def test_complex_mode(self):
        w, g = 1.5, -0.1
        t = np.linspace(0, 8 * 2 * np.pi / w, 400)
        a = np.exp((g - 1j * w) * t)
        m = mode_measurement(t, a)
        assert m.omega == pytest.approx(w, rel=1e-2)
        assert m.gamma == pytest.approx(g, rel=1e-2)

    def test_flat_signal_absent(self):
        t = np.linspace(0, 1, 64)
        m = mode_measurement(t, np.full(64, 2.5))
        assert m.omega is None and m.gamma is None

    def test_too_few_samples_rejected(self):
        with pytest.raises(ConfigError):
            mode_measurement(np.linspace(0, 1, 8), np.zeros(8))
