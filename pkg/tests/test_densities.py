import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpbm.densities import (
    ConcavityClass,
    Quadrature,
    body_measure,
    classify_concavity,
    gaussian,
    integrate,
    lebesgue,
    log_concave_exp,
    measure_of_set,
    quasi_concave_product,
    sconcave_power,
    triangular_profile_1d,
)
from lpbm.geometry import SampledSet, SupportBody, ball_set, box_set, interval_set
from lpbm.grid import Grid, GridFunction
from oracles import gaussian_interval_measure

# Frozen from the error-function series oracle.
GAUSS_MINUS1_1 = 0.6826894921370857


class TestMeasureOfSet:
    def test_unit_square(self):
        G = Grid.box([-0.5, -0.5], [1.5, 1.5], 32)
        assert measure_of_set(lebesgue(2), box_set(G, [0, 0], [1, 1])) == pytest.approx(1.0, abs=1e-12)

    def test_gaussian_interval(self):
        assert gaussian_interval_measure(-1, 1) == pytest.approx(GAUSS_MINUS1_1, rel=1e-14)
        G = Grid.box(-2, 2, 512)
        assert measure_of_set(gaussian(1), interval_set(G, -1, 1)) == pytest.approx(GAUSS_MINUS1_1, rel=1e-5)

    def test_midpoint_convergence(self):
        errs = []
        for r in (64, 128, 256):
            G = Grid.box(-2, 2, r)
            errs.append(abs(measure_of_set(gaussian(1), interval_set(G, -1, 1)) - GAUSS_MINUS1_1))
        assert errs[1] < errs[0] and errs[2] < errs[1]

    def test_empty_mask(self):
        G = Grid.box(-2, 2, 32)
        E = SampledSet.from_mask(G, np.zeros(32, bool), allow_empty=True)
        assert measure_of_set(gaussian(1), E) == 0.0
        with pytest.raises(ValueError):
            SampledSet.from_mask(G, np.zeros(32, bool))

    def test_set_outside_box(self):
        G = Grid.box([-0.5, -0.5], [1.5, 1.5], 32)
        with pytest.raises(ValueError):
            measure_of_set(lebesgue(2), box_set(G, [0, 0], [1, 1]), Quadrature((0, 0), (0.5, 0.5), 16))

    def test_additivity_and_monotonicity(self):
        G = Grid.box([-2, -2], [2, 2], 40)
        mu = gaussian(2)
        A = box_set(G, [-1, -1], [0, 1])
        mask_b = G.points()[:, 0].reshape(G.shape) > 0.05
        B = SampledSet.from_mask(G, mask_b & ball_set(G, 1.5).mask)
        U = SampledSet.from_mask(G, A.mask | B.mask)
        assert measure_of_set(mu, U) == pytest.approx(measure_of_set(mu, A) + measure_of_set(mu, B), rel=1e-12)
        assert measure_of_set(mu, A) <= measure_of_set(mu, U)

    def test_point_list_needs_quadrature(self):
        with pytest.raises(ValueError):
            measure_of_set(lebesgue(1), SampledSet(np.array([[0.0]])))

    def test_radial_decay_on_balls(self):
        mu = gaussian(2)
        K = SupportBody.ball(1.0, 2, 180)
        base = body_measure(mu, K)
        for t in (0.25, 0.5, 0.75):
            assert body_measure(mu, K.dilate(t)) >= t**2 * base * (1 - 1e-9)


class TestIntegrate:
    def test_indicator(self):
        G = Grid.box(-0.5, 1.5, 64)
        f = GridFunction.from_callable(G, lambda x: ((x[:, 0] > 0) & (x[:, 0] < 1)).astype(float))
        assert integrate(lebesgue(1), f) == pytest.approx(1.0, abs=1e-12)

    def test_laplace(self):
        G = Grid.box(-20, 20, 4000)
        f = GridFunction.from_callable(G, lambda x: np.exp(-np.abs(x[:, 0])))
        assert integrate(lebesgue(1), f) == pytest.approx(2.0, rel=1e-4)

    def test_gaussian_normalization(self):
        G = Grid.box(-10, 10, 400)
        f = GridFunction.from_callable(G, lambda x: np.ones(len(x)))
        assert integrate(gaussian(1), f) == pytest.approx(1.0, rel=1e-6)

    @given(st.floats(0.1, 5), st.floats(0.1, 5))
    def test_linearity(self, a, b):
        G = Grid.box(-3, 3, 48)
        f = GridFunction.from_callable(G, lambda x: np.exp(-x[:, 0] ** 2))
        g = GridFunction.from_callable(G, lambda x: np.maximum(1 - np.abs(x[:, 0]), 0))
        h = GridFunction(G, a * f.values + b * g.values)
        mu = gaussian(1)
        assert integrate(mu, h) == pytest.approx(a * integrate(mu, f) + b * integrate(mu, g), rel=1e-12)

    def test_dimension_mismatch(self):
        G = Grid.box(-1, 1, 16)
        with pytest.raises(ValueError):
            integrate(lebesgue(2), GridFunction.from_callable(G, lambda x: np.ones(len(x))))


class TestConcavity:
    def test_gaussian_log_concave(self):
        r = classify_concavity(gaussian(1), Quadrature((-3,), (3,), 64), ConcavityClass.LOG_CONCAVE)
        assert r.violation >= -1e-12 and r.ok

    def test_triangular_one_concave(self):
        r = classify_concavity(sconcave_power(1, 1), Quadrature((-1,), (1,), 64), ConcavityClass.S_CONCAVE, 1)
        assert r.violation >= -1e-12 and r.ok

    def test_cauchy_not_one_concave(self):
        mu = quasi_concave_product([lambda x: 1.0 / (1.0 + x**2)], name="cauchy")
        r = classify_concavity(mu, Quadrature((-3,), (3,), 64), ConcavityClass.S_CONCAVE, 1)
        assert r.violation < 0 and not r.ok

    def test_cauchy_is_quasi_concave_product(self):
        mu = quasi_concave_product([lambda x: 1.0 / (1.0 + x**2)] * 2, name="cauchy")
        r = classify_concavity(mu, Quadrature((-3, -3), (3, 3), 32), ConcavityClass.QUASI_CONCAVE_PRODUCT)
        assert r.ok

    def test_exponential_log_concave(self):
        mu = log_concave_exp(lambda x: np.abs(x[:, 0]), 1)
        assert classify_concavity(mu, Quadrature((-4,), (4,), 64), ConcavityClass.LOG_CONCAVE).ok

    def test_resolution_floor(self):
        with pytest.raises(ValueError):
            Quadrature((0,), (1,), 8)

    def test_product_factor_max_at_origin(self):
        with pytest.raises(ValueError):
            quasi_concave_product([lambda x: triangular_profile_1d(x - 0.5)])


class TestBodyMeasure:
    def test_gaussian_interval(self):
        mu = gaussian(1)
        assert body_measure(mu, SupportBody.interval(-1, 1)) == pytest.approx(GAUSS_MINUS1_1, rel=1e-12)

    def test_gaussian_disk(self):
        # Radial closed form 1 - exp(-1/2).
        assert body_measure(gaussian(2), SupportBody.ball(1, 2)) == pytest.approx(1 - math.exp(-0.5), rel=1e-4)
