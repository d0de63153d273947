"""Two-point generalized means and the L_p weight pair."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

import numpy as np


class AlphaKind(Enum):
    FINITE = "finite"
    ZERO = "zero"
    POS_INF = "+inf"
    NEG_INF = "-inf"


@dataclass(frozen=True)
class ExtendedReal:
    """Tagged extended real; ``value`` is meaningful only for FINITE."""

    kind: AlphaKind
    value: float = 0.0

    @classmethod
    def of(cls, x: Union[float, "ExtendedReal"]) -> "ExtendedReal":
        if isinstance(x, ExtendedReal):
            return x
        x = float(x)
        if math.isnan(x):
            raise ValueError("extended real cannot be NaN")
        if x == math.inf:
            return cls(AlphaKind.POS_INF)
        if x == -math.inf:
            return cls(AlphaKind.NEG_INF)
        if x == 0.0:
            return cls(AlphaKind.ZERO)
        return cls(AlphaKind.FINITE, x)

    def __float__(self) -> float:
        return {
            AlphaKind.FINITE: self.value,
            AlphaKind.ZERO: 0.0,
            AlphaKind.POS_INF: math.inf,
            AlphaKind.NEG_INF: -math.inf,
        }[self.kind]


AlphaLike = Union[float, ExtendedReal]


@dataclass(frozen=True)
class MeanParams:
    alpha: ExtendedReal
    t: float

    def __init__(self, alpha: AlphaLike, t: float):
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"t must lie in [0, 1], got {t}")
        object.__setattr__(self, "alpha", ExtendedReal.of(alpha))
        object.__setattr__(self, "t", t)


def generalized_mean(params: MeanParams, a: float, b: float) -> float:
    """Return M_alpha^t(a, b) for a, b >= 0.

    The value is 0 whenever ab = 0; the limit exponents use their closed
    forms (geometric mean, max, min).
    """
    if a < 0 or b < 0:
        raise ValueError("means are defined for nonnegative arguments")
    if a * b == 0:
        return 0.0
    t = params.t
    kind = params.alpha.kind
    if kind is AlphaKind.POS_INF:
        return max(a, b)
    if kind is AlphaKind.NEG_INF:
        return min(a, b)
    if kind is AlphaKind.ZERO:
        return math.exp((1.0 - t) * math.log(a) + t * math.log(b))
    al = params.alpha.value
    if t == 0.0:
        return float(a)
    if t == 1.0:
        return float(b)
    # Log domain with expm1/log1p keeps tiny |alpha| accurate and large |alpha| finite.
    la, lb = math.log(a), math.log(b)
    m = max(la, lb) if al > 0 else min(la, lb)
    u = (1.0 - t) * math.expm1(al * (la - m)) + t * math.expm1(al * (lb - m))
    return math.exp(m + math.log1p(u) / al)


def mean(alpha: AlphaLike, t: float, a: float, b: float) -> float:
    """Shorthand for ``generalized_mean(MeanParams(alpha, t), a, b)``."""
    return generalized_mean(MeanParams(alpha, t), a, b)


@dataclass(frozen=True)
class LpWeights:
    p: float
    t: float
    lam: float
    wA: float
    wB: float

    @property
    def total(self) -> float:
        return self.wA + self.wB


def combination_weights(p: float, alpha: float, beta: float, lam: float) -> tuple[float, float]:
    """Coefficients alpha^{1/p}(1-lam)^{(p-1)/p} and beta^{1/p} lam^{(p-1)/p}."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if alpha < 0 or beta < 0:
        raise ValueError("scalars must be nonnegative")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    q = (p - 1.0) / p
    # 0.0 ** 0.0 == 1.0, so p = 1 erases lambda as intended.
    return alpha ** (1.0 / p) * (1.0 - lam) ** q, beta ** (1.0 / p) * lam**q


def lp_weight_pair(p: float, t: float, lam: float) -> LpWeights:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    wA, wB = combination_weights(p, 1.0 - t, t, lam)
    return LpWeights(p=float(p), t=float(t), lam=float(lam), wA=wA, wB=wB)


def product_holder_bound(a: Sequence[float], b: Sequence[float]) -> bool:
    """Check prod|a_i| + prod|b_i| <= [prod(|a_i|^m + |b_i|^m)]^{1/m}."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    m = len(a)
    if m == 0:
        raise ValueError("sequences must be nonempty")
    # Compare logarithms so tiny or huge entries neither underflow nor overflow.
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(np.asarray(a, dtype=float)))
        lb = np.log(np.abs(np.asarray(b, dtype=float)))
    lhs = np.logaddexp(la.sum(), lb.sum())
    rhs = np.sum(np.logaddexp(m * la, m * lb)) / m
    return bool(lhs <= rhs + 1e-12)
