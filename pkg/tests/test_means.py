import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpbm.means import (
    AlphaKind,
    ExtendedReal,
    MeanParams,
    combination_weights,
    generalized_mean,
    lp_weight_pair,
    mean,
    product_holder_bound,
)
from oracles import power_mean

pos = st.floats(1e-3, 1e3)
unit = st.floats(0.0, 1.0)


class TestExtendedReal:
    @pytest.mark.parametrize("x,kind", [(0.0, AlphaKind.ZERO), (math.inf, AlphaKind.POS_INF),
                                        (-math.inf, AlphaKind.NEG_INF), (2.5, AlphaKind.FINITE)])
    def test_tagging(self, x, kind):
        assert ExtendedReal.of(x).kind is kind
        assert float(ExtendedReal.of(x)) == x

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            ExtendedReal.of(float("nan"))

    def test_t_out_of_range(self):
        with pytest.raises(ValueError):
            MeanParams(1.0, 1.5)


class TestGeneralizedMean:
    def test_identity(self):
        assert mean(2, 0.3, 5, 5) == pytest.approx(5, rel=1e-15)

    def test_arithmetic(self):
        # t weights the second argument: 0.75 * 2 + 0.25 * 6.
        assert mean(1, 0.25, 2, 6) == pytest.approx(3, rel=1e-15)
        assert mean(1, 0.75, 2, 6) == pytest.approx(5, rel=1e-15)

    def test_zero_product(self):
        assert mean(0.7, 0.3, 4, 0) == 0.0

    def test_min_case(self):
        assert mean(-math.inf, 0.5, 2, 7) == 2

    def test_negative_alpha_zero_argument(self):
        assert mean(-2.0, 0.5, 0.0, 3.0) == 0.0

    def test_negative_argument_rejected(self):
        with pytest.raises(ValueError):
            generalized_mean(MeanParams(1, 0.5), -1, 2)

    def test_large_alpha_no_overflow(self):
        assert mean(500.0, 0.5, 10.0, 20.0) == pytest.approx(20 * 0.5 ** (1 / 500), rel=1e-12)

    @given(pos, st.floats(0.01, 0.99), st.floats(-20, 20))
    def test_identity_property(self, a, t, alpha):
        assert mean(alpha, t, a, a) == pytest.approx(a, rel=1e-12)

    @given(pos, pos, st.floats(0.01, 0.99), st.floats(-8, 8), st.floats(0, 8))
    def test_monotone_in_alpha(self, a, b, t, alpha, gap):
        assert mean(alpha, t, a, b) <= mean(alpha + gap, t, a, b) * (1 + 1e-12)

    @given(pos, pos, st.floats(0.01, 0.99))
    def test_limit_cases_match_closed_forms(self, a, b, t):
        assert mean(0.0, t, a, b) == pytest.approx(a ** (1 - t) * b**t, rel=1e-12)
        assert mean(math.inf, t, a, b) == max(a, b)
        assert mean(-math.inf, t, a, b) == min(a, b)

    @given(pos, pos, st.floats(0.01, 0.99))
    def test_limits_approached_numerically(self, a, b, t):
        assert mean(1e-7, t, a, b) == pytest.approx(mean(0.0, t, a, b), rel=1e-5)
        assert mean(400.0, t, a, b) == pytest.approx(max(a, b), rel=2e-2)

    @given(pos, pos, pos, st.floats(0.01, 0.99), st.floats(-5, 5))
    def test_monotone_in_arguments(self, a, b, d, t, alpha):
        assert mean(alpha, t, a, b) <= mean(alpha, t, a + d, b) * (1 + 1e-12)

    @given(pos, pos, st.floats(0.0, 1.0), st.sampled_from([-3.0, -1.0, 0.0, 0.5, 1.0, 2.0, math.inf]))
    def test_agrees_with_oracle(self, a, b, t, alpha):
        assert mean(alpha, t, a, b) == pytest.approx(power_mean(alpha, t, a, b), rel=1e-12)


class TestWeights:
    def test_p1_erases_lambda(self):
        w = lp_weight_pair(1, 0.4, 0.9)
        assert (w.wA, w.wB) == pytest.approx((0.6, 0.4), abs=1e-15)

    def test_holder_equality(self):
        w = lp_weight_pair(2, 0.5, 0.5)
        assert (w.wA, w.wB) == pytest.approx((0.5, 0.5), abs=1e-15)
        assert w.total == pytest.approx(1.0, abs=1e-15)

    def test_lambda_zero(self):
        w = lp_weight_pair(2, 0.5, 0.0)
        # Frozen from direct evaluation: sqrt(0.5).
        assert w.wA == pytest.approx(0.7071067811865476, rel=1e-15)
        assert w.wB == 0.0

    def test_rejects_small_p(self):
        with pytest.raises(ValueError):
            lp_weight_pair(0.5, 0.5, 0.5)
        with pytest.raises(ValueError):
            combination_weights(2, 1, 1, 1.5)

    def test_grid_sum_bound(self):
        P = np.linspace(1, 10, 50)
        T = np.linspace(0, 1, 50)
        L = np.linspace(0, 1, 50)
        for p, t, lam in itertools.product(P, T, L):
            w = lp_weight_pair(p, t, lam)
            assert w.total <= 1 + 1e-12
        for p, t in itertools.product(P, T):
            assert lp_weight_pair(p, t, t).total == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(1, 20), unit, unit)
    def test_sum_bound_property(self, p, t, lam):
        assert lp_weight_pair(p, t, lam).total <= 1 + 1e-12


class TestHolder:
    def test_equal_sequences(self):
        assert product_holder_bound([1, 1], [1, 1])

    def test_example(self):
        assert product_holder_bound([2, 3], [1, 4])
        assert 10 <= math.sqrt(17 * 97)

    def test_zero_products(self):
        assert product_holder_bound([0, 5], [2, 0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            product_holder_bound([1], [1, 2])
        with pytest.raises(ValueError):
            product_holder_bound([], [])

    @given(st.integers(1, 6).flatmap(lambda m: st.tuples(
        st.lists(st.floats(-50, 50), min_size=m, max_size=m),
        st.lists(st.floats(-50, 50), min_size=m, max_size=m))))
    def test_always_true(self, ab):
        assert product_holder_bound(*ab)
