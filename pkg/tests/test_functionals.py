import math

import numpy as np
import pytest

from lpbm.densities import gaussian, lebesgue
from lpbm.functionals import (
    EpsSchedule,
    FKind,
    FSpec,
    cell_integral,
    check_F_concavity,
    mixed_volume_VpF,
    residual_MpF,
    surface_area,
)
from lpbm.geometry import SupportBody
from lpbm.grid import Grid, GridFunction

GI = Grid.box(-0.25, 1.25, 48)
UNIT = GridFunction.from_callable(GI, lambda x: ((x[:, 0] >= 0) & (x[:, 0] <= 1)).astype(float))
A = SupportBody.interval(-1, 1)
LEB = lebesgue(1)


class TestFSpec:
    def test_power(self):
        F = FSpec.power(2)
        assert F.kind is FKind.POWER
        assert (F(3.0), F.derivative(1.0), F.inverse(9.0)) == pytest.approx((9.0, 2.0, 3.0))

    def test_log(self):
        F = FSpec.log()
        assert (F(math.e), F.derivative(2.0), F.inverse(1.0)) == pytest.approx((1.0, 0.5, math.e))

    def test_bad_exponent(self):
        with pytest.raises(ValueError):
            FSpec.power(0.0)

    def test_schedule(self):
        s = EpsSchedule()
        assert s.values[0] == 0.1 and len(s.values) == 7
        assert np.all(np.diff(s.values) < 0) and s.smallest == pytest.approx(0.1 / 64)
        with pytest.raises(ValueError):
            EpsSchedule(eps0=-1.0)


class TestSurfaceArea:
    @pytest.mark.parametrize("p,s", [(1, 1), (2, 1), (1, 2), (2, 2)])
    def test_interval_closed_form(self, p, s):
        est = surface_area(LEB, UNIT, UNIT, p, s)
        assert est.value == pytest.approx((1 + s) / p, rel=0.05)
        assert est.richardson == pytest.approx(est.trailing_min, rel=0.02)

    def test_point_support_is_neutral_in_the_limit(self):
        # g is a single cell at the origin; the quotient is that cell's width.
        for res in (17, 171):
            gp = Grid.box(-0.5, 0.5, res)
            pt = GridFunction.from_callable(gp, lambda x: 0.5 * (np.abs(x[:, 0]) < 1e-9))
            est = surface_area(LEB, UNIT, pt, 1, 0.0)
            assert est.value == pytest.approx(gp.step[0], rel=1e-9)

    def test_cell_integral_lebesgue_exact(self):
        assert cell_integral(LEB, UNIT) == pytest.approx(1.0, abs=1e-12)

    def test_cell_integral_gaussian(self):
        G = Grid.box(-1, 1, 16)
        one = GridFunction.from_callable(G, lambda x: np.ones(len(x)))
        assert cell_integral(gaussian(1), one) == pytest.approx(0.6826894921370857, rel=1e-7)


class TestBodyFunctionals:
    def test_mixed_volume_p2(self):
        assert mixed_volume_VpF(LEB, FSpec.power(2), A, A, 2).value == pytest.approx(2.0, rel=0.05)

    def test_mixed_volume_p1(self):
        assert mixed_volume_VpF(LEB, FSpec.power(1), A, A, 1).value == pytest.approx(2.0, rel=1e-6)

    def test_mixed_volume_origin_limit(self):
        tiny = SupportBody.interval(-1e-9, 1e-9)
        assert abs(mixed_volume_VpF(LEB, FSpec.power(1), A, tiny, 1).value) <= 1e-8

    def test_residual_zero(self):
        assert abs(residual_MpF(LEB, FSpec.power(2), A, 2).value) <= 0.05 * 2
        assert abs(residual_MpF(LEB, FSpec.power(1), A, 1).value) <= 1e-6

    def test_residual_degenerate(self):
        assert abs(residual_MpF(LEB, FSpec.power(1), SupportBody.interval(-1e-12, 1e-12), 1).value) <= 1e-11

    def test_disk(self):
        D = SupportBody.ball(1.0, 2, 360)
        v = mixed_volume_VpF(lebesgue(2), FSpec.power(1), D, D, 2).value
        assert v == pytest.approx(D.area(), rel=0.05)


class TestFConcavity:
    def test_lebesgue_bodies(self):
        pairs = [(A, SupportBody.interval(-0.5, 2.0)), (A, SupportBody.interval(-3.0, 0.25))]
        r = check_F_concavity(LEB, FSpec.power(2), pairs, 2, 0, np.linspace(0, 1, 5))
        assert r.worst_margin >= -1e-9

    def test_endpoints(self):
        r = check_F_concavity(LEB, FSpec.power(2), [(A, SupportBody.interval(-0.5, 2))], 2, 0, [0.0, 1.0],
                              eps_grid=[])
        assert abs(r.worst_margin) <= 1e-12

    def test_equal_pair(self):
        r = check_F_concavity(LEB, FSpec.power(2), [(A, A)], 2, 0, np.linspace(0, 1, 5), eps_grid=[])
        assert abs(r.worst_margin) <= 1e-12

    def test_gaussian_log(self):
        r = check_F_concavity(gaussian(1), FSpec.log(), [(A, SupportBody.interval(-0.5, 2))], 2, 0,
                              np.linspace(0, 1, 5))
        assert r.worst_margin >= -1e-9

    def test_function_pairs(self):
        G = Grid.box(-1.5, 1.5, 48)
        f = GridFunction.from_callable(G, lambda x: np.maximum(1 - np.abs(x[:, 0]), 0))
        g = GridFunction.from_callable(G, lambda x: np.maximum(1 - np.abs(x[:, 0] - 0.3) / 0.6, 0))
        # Lebesgue with s = 1 in dimension 1 is F-concave for F(t) = t^{p/(n+s)}.
        r = check_F_concavity(LEB, FSpec.power(1.0), [(f, g)], 2, 1.0, [0.3, 0.7], lambda_grid=17)
        assert r.worst_margin >= -4 * G.step[0]
