import math

import numpy as np
import pytest

from lpbm.grid import Grid, GridFunction
from lpbm.revolution import (
    MultipleFunction,
    RevolutionBody,
    ball_body,
    check_inclusion_lemma,
    direct_multiple_volume,
    direct_revolution_volume,
    level_body,
    multiple_volume,
    revolution_volume,
    volume_identity_gap,
)
from lpbm.supconv import ConvolutionParams
from oracles import midpoint_radial_integral

G = Grid.box(-0.5, 2.5, 96)


def box1(grid, lo, hi):
    return GridFunction.from_callable(grid, lambda x: ((x[:, 0] > lo) & (x[:, 0] < hi)).astype(float))


W1 = box1(G, 0, 1)
ZERO = GridFunction(G, np.zeros(G.shape))
GL = Grid.box(-12, 12, 480)
LAPLACE = GridFunction.from_callable(GL, lambda x: np.exp(-np.abs(x[:, 0])))
GAUSS = GridFunction.from_callable(GL, lambda x: np.exp(-x[:, 0] ** 2 / 2))


class TestVolumes:
    def test_cylinder(self):
        body = RevolutionBody(W1, 2)
        assert revolution_volume(body) == pytest.approx(math.pi, rel=1e-12)
        assert direct_revolution_volume(body) == pytest.approx(math.pi, rel=0.02)

    def test_zero_profile(self):
        assert revolution_volume(RevolutionBody(ZERO, 2)) == 0.0
        assert multiple_volume(MultipleFunction(ZERO, 2), 1) == 0.0

    def test_strip(self):
        body = RevolutionBody(W1, 1)
        assert revolution_volume(body) == pytest.approx(2.0, rel=1e-12)
        assert direct_revolution_volume(body) == pytest.approx(2.0, rel=0.02)

    def test_triangle_profile(self):
        tri = GridFunction.from_callable(G, lambda x: np.maximum(1 - 2 * np.abs(x[:, 0] - 0.5), 0))
        body = RevolutionBody(tri, 1)
        assert direct_revolution_volume(body) == pytest.approx(revolution_volume(body), rel=0.02)

    def test_multiple_square(self):
        mf = MultipleFunction(W1, 2)
        assert multiple_volume(mf, 1) == pytest.approx(2.0, rel=1e-12)
        assert direct_multiple_volume(mf, 1) == pytest.approx(2.0, rel=0.02)

    def test_multiple_reduces_to_revolution(self):
        w2 = box1(G, 0, 2)
        mf = MultipleFunction(w2, 1)
        assert multiple_volume(mf, 2) == pytest.approx(2 * math.pi, rel=1e-12)
        assert multiple_volume(mf, 2) == pytest.approx(revolution_volume(RevolutionBody(w2, 2)), rel=1e-14)
        assert direct_multiple_volume(mf, 2) == pytest.approx(2 * math.pi, rel=0.02)

    def test_multiple_function_product(self):
        mf = MultipleFunction(W1, 2)
        v = mf.at(np.array([[0.5, 0.5], [0.5, 1.5]]))
        assert v.tolist() == [1.0, 0.0]


class TestInclusion:
    GI = Grid.box(-0.5, 1.5, 64)

    def test_equal_boxes(self):
        f = box1(self.GI, 0, 1)
        r = check_inclusion_lemma(f, f, ConvolutionParams(2, 0.5, 1))
        assert r.ok and r.violations == 0 and r.points_checked > 0

    def test_t_zero(self):
        f = box1(self.GI, 0, 1)
        assert check_inclusion_lemma(f, f, ConvolutionParams(2, 0.0, 1)).ok

    def test_triangle_and_box(self):
        tri = GridFunction.from_callable(self.GI, lambda x: np.maximum(1 - 2 * np.abs(x[:, 0] - 0.5), 0))
        box = box1(self.GI, 0, 1)
        r = check_inclusion_lemma(tri, box, ConvolutionParams(1, 0.3, 2), stride=2)
        assert r.violations == 0

    def test_product_form(self):
        tri = GridFunction.from_callable(self.GI, lambda x: np.maximum(1 - 2 * np.abs(x[:, 0] - 0.5), 0))
        box = box1(self.GI, 0, 1)
        r = check_inclusion_lemma(tri, box, ConvolutionParams(2, 0.3, 0.5), form="B", ell=1, copies=2, stride=4)
        assert r.violations == 0

    def test_dimension_budget(self):
        f = box1(self.GI, 0, 1)
        with pytest.raises(ValueError):
            check_inclusion_lemma(f, f, ConvolutionParams(2, 0.5, 1.5), form="B", ell=3, copies=2)


class TestBallBody:
    def test_laplace(self):
        K = ball_body(LAPLACE, 1)
        assert K.rho == pytest.approx([1.0, 1.0], abs=GL.step[0])

    def test_indicator(self):
        f = box1(Grid.box(-2, 2, 64), -1, 1)
        assert ball_body(f, 1).rho == pytest.approx([1.0, 1.0], abs=1e-12)

    def test_volume_identity(self):
        K = ball_body(LAPLACE, 1)
        integral = LAPLACE.values.sum() * GL.cell_volume / LAPLACE.sup
        assert K.volume() == pytest.approx(integral, rel=1e-3)
        assert abs(volume_identity_gap(LAPLACE)) <= 1e-3

    def test_homogeneity(self):
        K1 = ball_body(LAPLACE, 1)
        K2 = ball_body(GridFunction(GL, 3.0 * LAPLACE.values), 1)
        assert K2.rho == pytest.approx(K1.rho, rel=1e-14)

    def test_max_off_origin(self):
        shifted = GridFunction.from_callable(GL, lambda x: np.exp(-np.abs(x[:, 0] - 1)))
        with pytest.raises(ValueError):
            ball_body(shifted, 1)

    def test_zero_integral(self):
        with pytest.raises(ValueError):
            ball_body(GridFunction(GL, np.zeros(GL.shape)), 1)


class TestLevelBody:
    def test_laplace(self):
        r = level_body(LAPLACE)
        assert r.inner_ok
        assert r.km_ratio == pytest.approx(1.0, abs=2 * GL.step[0])

    def test_gaussian(self):
        rho = midpoint_radial_integral(lambda t: np.exp(-t**2 / 2), 1, 40.0)
        # Frozen from the radial oracle: sqrt(2) / sqrt(pi / 2).
        assert math.sqrt(2) / rho == pytest.approx(1.1283791670955128, rel=1e-9)
        r = level_body(GAUSS)
        assert r.inner_ok and r.km_ratio >= 1
        assert r.km_ratio == pytest.approx(1.1283791670955128, abs=GL.step[0] / rho)

    def test_indicator(self):
        r = level_body(box1(Grid.box(-2, 2, 64), -1, 1))
        assert r.km_ratio == pytest.approx(1.0, abs=1e-12)

    def test_gaussian_2d(self):
        G2 = Grid.box([-8, -8], [8, 8], 128)
        f = GridFunction.from_callable(G2, lambda x: np.exp(-np.sum(x**2, 1) / 2))
        r = level_body(f)
        assert r.inner_ok and 1 <= r.km_ratio < 10
        assert abs(volume_identity_gap(f)) <= 0.01
