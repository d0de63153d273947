import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpbm.densities import cauchy_profile_1d, gaussian, lebesgue, quasi_concave_product, sconcave_power
from lpbm.fixtures import (
    gz_nonproduct_fixture,
    log_concave_body_family,
    non_unconditional_fixture,
    radial_decay_fixtures,
)
from lpbm.geometry import SupportBody, interval_set
from lpbm.grid import Grid, GridFunction
from lpbm.harness import (
    CheckParams,
    Fixture,
    TheoremId,
    check_inequality,
    estimate_gz_constant,
    positively_decreasing,
    sweep,
)

G = Grid.box(-0.5, 1.5, 64)
LEB = lebesgue(1)
GS = Grid.box(-3, 3, 48)
F_GAUSS = GridFunction.from_callable(GS, lambda x: np.exp(-x[:, 0] ** 2 / 2))
G_GAUSS = GridFunction.from_callable(GS, lambda x: np.exp(-(x[:, 0] - 0.5) ** 2))
PL_FIXTURE = Fixture("gauss_pair", LEB, f=F_GAUSS, g=G_GAUSS)


def intervals(a, b, c, d, mu=LEB, grid=G):
    return Fixture("intervals", mu, A=interval_set(grid, a, b), B=interval_set(grid, c, d))


class TestTheoremId:
    def test_parse(self):
        assert TheoremId.parse("lp_bbl") is TheoremId.LP_BBL
        assert len(TheoremId) == 15

    def test_unknown(self):
        with pytest.raises(ValueError, match="NOPE"):
            TheoremId.parse("NOPE")
        with pytest.raises(ValueError):
            check_inequality("NOPE", PL_FIXTURE, CheckParams(1, 0.5))


class TestParams:
    def test_ranges(self):
        with pytest.raises(ValueError):
            CheckParams(0.5, 0.5)
        with pytest.raises(ValueError):
            CheckParams(1, 1.5)
        with pytest.raises(ValueError):
            CheckParams(1, 0.5, s=-1)
        with pytest.raises(ValueError):
            CheckParams(1, 0.5, tolerance_scale=0)


class TestExamples:
    def test_bmi_sets_equality(self):
        r = check_inequality("LP_BMI_SETS", intervals(0, 1, 0, 1), CheckParams(2, 0.5))
        assert r.lhs == pytest.approx(1.0, abs=1e-12) and r.rhs == pytest.approx(1.0, abs=1e-12)
        assert abs(r.margin) <= 1e-12 and r.passed

    def test_bmi_sconcave(self):
        G2 = Grid.box(-1, 1, 64)
        fx = intervals(0, 0.5, 0, 0.8, mu=sconcave_power(1, 1), grid=G2)
        r = check_inequality("LP_BMI_SCONCAVE", fx, CheckParams(2, 0.5))
        assert r.applicable and r.passed and r.margin >= -r.tolerance

    def test_support_extension_noted(self):
        G2 = Grid.box(-1.5, 1.5, 64)
        inside = intervals(0, 0.3, 0, 0.5, mu=sconcave_power(1, 1), grid=G2)
        beyond = intervals(0, 1.45, 0, 1.4, mu=sconcave_power(1, 1), grid=G2)
        assert check_inequality("LP_BMI_SCONCAVE", inside, CheckParams(2, 0.5)).notes == ""
        r = check_inequality("LP_BMI_SCONCAVE", beyond, CheckParams(2, 0.5))
        assert r.passed and "extended by zero" in r.notes

    def test_radial_decay(self):
        fx = Fixture("gz", gaussian(1), K=SupportBody.interval(-1, 1), L=SupportBody.interval(-0.5, 1.5))
        r = check_inequality("GZ_RADIAL_DECAY", fx, CheckParams(2, 0.5))
        assert r.passed and r.lhs >= r.rhs

    def test_pl_recovery(self):
        r = check_inequality("PL_RECOVERY", PL_FIXTURE, CheckParams(1, 0.3))
        assert r.passed and r.lam == 0.3

    def test_report_invariant(self):
        for th, fx, pr in [("LP_BMI_SETS", intervals(0, 0.5, 0.25, 1.25), CheckParams(2, 0.3)),
                           ("LP_BBL", PL_FIXTURE, CheckParams(2, 0.3, s=1.0, lambda_grid=33))]:
            r = check_inequality(th, fx, pr)
            assert r.margin == pytest.approx(r.lhs - r.rhs, abs=1e-15)
            assert r.passed == (r.margin >= -r.tolerance and r.applicable)


class TestHypotheses:
    def test_non_unconditional_rejected(self):
        fx = non_unconditional_fixture()
        for th in ("LP_PLI_PRODUCT", "LP_PLI_SETS", "LP_BMI_PRODUCT"):
            r = check_inequality(th, fx, CheckParams(2, 0.5))
            assert not r.applicable and not r.passed
            assert math.isnan(r.lhs) and r.notes == "inapplicable"

    def test_nonproduct_rejected(self):
        r = check_inequality("GZ_PRODUCT_MIN", gz_nonproduct_fixture(), CheckParams(1, 0.5))
        assert not r.applicable
        assert any("product" in v for v in r.hypothesis_violations)

    def test_missing_inputs(self):
        r = check_inequality("LP_BBL", intervals(0, 1, 0, 1), CheckParams(1, 0.5))
        assert not r.applicable

    def test_dimension_mismatch(self):
        G2 = Grid.box([-1, -1], [1, 1], 16)
        f2 = GridFunction.from_callable(G2, lambda x: np.ones(len(x)))
        with pytest.raises(ValueError, match="dimension"):
            check_inequality("LP_BBL", Fixture("bad", LEB, f=f2, g=G_GAUSS), CheckParams(1, 0.5))

    def test_positively_decreasing(self):
        Gd = Grid.box(-1, 1, 32)
        assert positively_decreasing(GridFunction.from_callable(Gd, lambda x: np.exp(-np.abs(x[:, 0]))))
        assert not positively_decreasing(GridFunction.from_callable(Gd, lambda x: np.exp(-(x[:, 0] - 0.5) ** 2)))


class TestSweep:
    def test_bmi_sets_sweep(self):
        reps = sweep("LP_BMI_SETS", [intervals(0, 0.5, 0.25, 1.25)], [1, 1.5, 2, 4], [0.1, 0.3, 0.5, 0.7, 0.9])
        assert len(reps) == 20 and all(r.passed for r in reps)
        assert [(r.p, r.t) for r in reps[:6]] == [(1, 0.1), (1, 0.3), (1, 0.5), (1, 0.7), (1, 0.9), (1.5, 0.1)]

    def test_empty(self):
        assert sweep("LP_BMI_SETS", [intervals(0, 1, 0, 1)], [], [0.5]) == []
        assert sweep("LP_BMI_SETS", [], [1], [0.5]) == []

    def test_single_point(self):
        fx = intervals(0, 0.5, 0.25, 1.25)
        [r] = sweep("LP_BMI_SETS", [fx], [2], [0.3], [1.0])
        c = check_inequality("LP_BMI_SETS", fx, CheckParams(2, 0.3, 1.0))
        assert (r.lhs, r.rhs, r.margin, r.tolerance, r.passed) == (c.lhs, c.rhs, c.margin, c.tolerance, c.passed)

    def test_rhs_nested_in_p(self):
        reps = sweep("LP_BBL", [PL_FIXTURE], [1, 1.5, 2, 4], [0.3], [1.0], CheckParams(1, 0.5, lambda_grid=33))
        rhs = [r.rhs for r in reps]
        assert all(a <= b * (1 + 1e-12) for a, b in zip(rhs, rhs[1:]))

    @given(st.sampled_from([1.0, 1.5, 2.0, 4.0]), st.floats(0.05, 0.95),
           st.sampled_from([0.0, 1.0, 2.0, math.inf]))
    def test_pruned_equals_naive(self, p, t, s):
        base = CheckParams(p, t, s, lambda_grid=17)
        a = check_inequality("LP_BBL", PL_FIXTURE, base)
        b = check_inequality("LP_BBL", PL_FIXTURE, replace(base, kernel="naive"))
        assert abs(a.lhs - b.lhs) <= 1e-12 * max(1.0, abs(a.lhs))


class TestGZ:
    def test_symmetric(self):
        fx = Fixture("sym", gaussian(1), K=SupportBody.interval(-1, 1), L=SupportBody.interval(-1, 1))
        est = estimate_gz_constant([fx], [1, 2], [0.3, 0.5])
        assert est.C == pytest.approx(1.0, abs=1e-6)

    def test_gaussian_pair(self):
        fx = Fixture("pair", gaussian(1), K=SupportBody.interval(-1, 1), L=SupportBody.interval(-2, 2))
        est = estimate_gz_constant([fx], [1], [0.5])
        assert est.C >= 1 and est.instances == 1 and est.witness[0] == "pair"

    def test_radial_decay_bound(self):
        for p in (1.0, 2.0, 4.0):
            est = estimate_gz_constant(radial_decay_fixtures(), [p], [0.1, 0.5, 0.9])
            assert est.C <= 2 ** (1 / p)

    def test_full_family(self):
        est = estimate_gz_constant(log_concave_body_family(), [1, 2, 4], [0.1, 0.5, 0.9])
        assert 1 <= est.C < 10

    def test_non_log_concave_rejected(self):
        fx = Fixture("cauchy", quasi_concave_product([cauchy_profile_1d]), K=SupportBody.interval(-0.5, 0.5),
                     L=SupportBody.interval(-0.5, 0.5))
        with pytest.raises(ValueError, match="log-concave"):
            estimate_gz_constant([fx], [1], [0.5])
