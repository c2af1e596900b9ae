import numpy as np
import pytest

from riskwaves.errors import ConfigError, ShapeError
from riskwaves.espace import (
    ScalarField,
    SpaceGrid,
    VectorField,
    curl,
    divergence,
    gradient,
    laplacian,
)


def grid1d(cells=64, X=1.0, boundary="periodic"):
    return SpaceGrid(dim=1, extent=(X,), cells=(cells,), boundary=boundary)


class TestSpaceGrid:
    def test_spacing_positive(self):
        g = SpaceGrid(dim=2, extent=(2.0, 3.0), cells=(8, 12))
        assert g.spacing == (0.25, 0.25)
        assert g.num_points == 96

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(dim=4, extent=(1, 1, 1, 1), cells=(8, 8, 8, 8)),
            dict(dim=1, extent=(0.0,), cells=(8,)),
            dict(dim=1, extent=(1.0,), cells=(3,)),
            dict(dim=1, extent=(1.0,), cells=(8,), boundary="absorbing"),
            dict(dim=2, extent=(1.0,), cells=(8, 8)),
        ],
    )
    def test_invalid_grids_rejected(self, kwargs):
        with pytest.raises(ConfigError):
            SpaceGrid(**kwargs)

    def test_reflective_coords_are_cell_centers(self):
        g = grid1d(cells=4, boundary="reflective")
        assert np.allclose(g.axis_coords(0), [0.125, 0.375, 0.625, 0.875])

    def test_periodic_coords_are_nodes(self):
        g = grid1d(cells=4)
        assert np.allclose(g.axis_coords(0), [0.0, 0.25, 0.5, 0.75])


class TestFieldShapes:
    def test_scalar_shape_mismatch_rejected(self):
        g = grid1d(8)
        with pytest.raises(ShapeError):
            ScalarField(g, np.zeros(9))

    def test_vector_shape_mismatch_rejected(self):
        g = grid1d(8)
        with pytest.raises(ShapeError):
            VectorField(g, np.zeros((2, 8)))


class TestGradient:
    def test_constant_field_zero_gradient(self):
        g = grid1d(16)
        out = gradient(ScalarField.full(g, 3.7))
        assert np.all(out.values == 0.0)

    def test_periodic_sine_matches_analytic(self):
        X = 2.0
        g = grid1d(128, X=X)
        k = 2 * np.pi / X
        f = ScalarField.from_function(g, lambda x: np.sin(k * x))
        out = gradient(f)
        exact = k * np.cos(k * g.axis_coords(0))
        err = np.max(np.abs(out.values[0] - exact))
        assert err < 0.5 * k * (k * g.spacing[0]) ** 2  # second-order bound

    def test_linear_field_exact_on_reflective(self):
        g = grid1d(32, boundary="reflective")
        f = ScalarField.from_function(g, lambda x: 2.0 * x + 1.0)
        out = gradient(f)
        assert np.max(np.abs(out.values[0] - 2.0)) < 1e-12


class TestDivergence:
    def test_uniform_vector_field(self):
        g = SpaceGrid(dim=2, extent=(1.0, 1.0), cells=(16, 16))
        assert np.all(divergence(VectorField.full(g, (1.0, -2.0))).values == 0.0)

    def test_linear_1d_reflective(self):
        g = grid1d(32, boundary="reflective")
        v = VectorField(g, g.axis_coords(0)[None, :])
        out = divergence(v)
        assert np.max(np.abs(out.values - 1.0)) < 1e-12

    def test_2d_periodic_sine(self):
        X = 1.0
        g = SpaceGrid(dim=2, extent=(X, X), cells=(96, 96))
        k = 2 * np.pi / X
        xx, yy = g.meshgrid()
        v = VectorField(g, np.stack([np.sin(k * xx), np.zeros_like(xx)]))
        out = divergence(v)
        exact = k * np.cos(k * xx)
        assert np.max(np.abs(out.values - exact)) < 0.5 * k * (k * g.spacing[0]) ** 2

    def test_periodic_telescoping_sum(self):
        rng = np.random.default_rng(7)
        g = SpaceGrid(dim=2, extent=(1.0, 2.0), cells=(12, 10))
        v = VectorField(g, rng.normal(size=(2, 12, 10)))
        total = np.sum(divergence(v).values)
        assert abs(total) < 1e-10 * np.sum(np.abs(v.values))


class TestLaplacianCurl:
    def test_laplacian_constant(self):
        g = grid1d(16)
        assert np.all(laplacian(ScalarField.full(g, 5.0)).values == 0.0)

    def test_laplacian_sine(self):
        X = 1.0
        g = grid1d(256, X=X)
        k = 2 * np.pi / X
        f = ScalarField.from_function(g, lambda x: np.sin(k * x))
        out = laplacian(f)
        exact = -k * k * np.sin(k * g.axis_coords(0))
        assert np.max(np.abs(out.values - exact)) < 0.1 * k * k * (k * g.spacing[0]) ** 2

    def test_curl_uniform_is_zero(self):
        g = SpaceGrid(dim=3, extent=(1, 1, 1), cells=(8, 8, 8))
        assert np.all(curl(VectorField.full(g, (1.0, 2.0, 3.0))).values == 0.0)

    def test_curl_needs_dim3(self):
        g = grid1d(8)
        with pytest.raises(ConfigError, match="rot_v"):
            curl(VectorField(g))

    def test_curl_of_rotation_field(self):
        g = SpaceGrid(dim=3, extent=(1, 1, 1), cells=(16, 16, 16), boundary="reflective")
        xx, yy, zz = g.meshgrid()
        # v = (-y, x, 0) -> curl = (0, 0, 2)
        v = VectorField(g, np.stack([-yy, xx, np.zeros_like(xx)]))
        out = curl(v)
        assert np.max(np.abs(out.values[2] - 2.0)) < 1e-11
        assert np.max(np.abs(out.values[:2])) < 1e-11


@pytest.mark.parametrize("op_name", ["gradient", "divergence", "laplacian"])
def test_order_of_accuracy(op_name):
    """Max-norm error halves-grid study: measured order must sit in [1.8, 2.2]."""
    X = 1.0
    k = 2 * np.pi / X
    errs = []
    for cells in (32, 64, 128):
        g = grid1d(cells, X=X)
        x = g.axis_coords(0)
        if op_name == "gradient":
            out = gradient(ScalarField(g, np.sin(k * x))).values[0]
            exact = k * np.cos(k * x)
        elif op_name == "divergence":
            out = divergence(VectorField(g, np.sin(k * x)[None, :])).values
            exact = k * np.cos(k * x)
        else:
            out = laplacian(ScalarField(g, np.sin(k * x))).values
            exact = -k * k * np.sin(k * x)
        errs.append(np.max(np.abs(out - exact)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.8) and np.all(orders < 2.2)


def test_linear_exactness_affine_2d():
    g = SpaceGrid(dim=2, extent=(1.0, 1.0), cells=(16, 16), boundary="reflective")
    xx, yy = g.meshgrid()
    f = ScalarField(g, 1.0 + 2.0 * xx - 3.0 * yy)
    out = gradient(f)
    assert np.max(np.abs(out.values[0] - 2.0)) < 1e-12
    assert np.max(np.abs(out.values[1] + 3.0)) < 1e-12


def test_operations_do_not_mutate_inputs():
    g = grid1d(16)
    f = ScalarField.from_function(g, lambda x: np.sin(x))
    before = f.values.copy()
    gradient(f)
    laplacian(f)
    assert np.array_equal(f.values, before)
