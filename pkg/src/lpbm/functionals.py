"""Surface-area type functionals and F-concavity tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .densities import Density, body_measure
from .geometry import SupportBody, firey_combine
from .grid import GridFunction
from .supconv import ConvolutionParams, oplus_ps, sup_convolution

CELL_ORDER = 3


class FKind(Enum):
    POWER = "power"
    LOG = "log"


@dataclass(frozen=True)
class FSpec:
    """F(t) = t^kappa or F(t) = log t, with derivative and inverse."""

    kind: FKind
    exponent: float = 1.0

    def __post_init__(self):
        if self.kind is FKind.POWER and not self.exponent > 0:
            raise ValueError("power exponent must be positive")

    @classmethod
    def power(cls, kappa: float) -> "FSpec":
        return cls(FKind.POWER, float(kappa))

    @classmethod
    def log(cls) -> "FSpec":
        return cls(FKind.LOG)

    def __call__(self, x: float) -> float:
        if self.kind is FKind.LOG:
            return math.log(x) if x > 0 else -math.inf
        return float(x) ** self.exponent

    def derivative(self, x: float) -> float:
        if self.kind is FKind.LOG:
            return 1.0 / x if x > 0 else math.inf
        k = self.exponent
        if x == 0:
            return math.inf if k < 1 else (1.0 if k == 1 else 0.0)
        return k * float(x) ** (k - 1.0)

    def inverse(self, y: float) -> float:
        if self.kind is FKind.LOG:
            return math.exp(y)
        if y < 0:
            raise ValueError("power F has no preimage for negative values")
        return float(y) ** (1.0 / self.exponent)


@dataclass(frozen=True)
class EpsSchedule:
    """eps_k = eps0 2^{-k}, k = 0..K."""

    eps0: float = 0.1
    K: int = 6

    def __post_init__(self):
        if not self.eps0 > 0 or self.K < 2:
            raise ValueError("need eps0 > 0 and K >= 2")

    @property
    def values(self) -> np.ndarray:
        return self.eps0 * 0.5 ** np.arange(self.K + 1)

    @property
    def smallest(self) -> float:
        return float(self.values[-1])


@dataclass(frozen=True, eq=False)
class DerivativeEstimate:
    """Difference quotients over a schedule and two limit surrogates."""

    eps: np.ndarray = field(repr=False)
    quotients: np.ndarray = field(repr=False)
    trailing_min: float
    richardson: float
    diverged: bool = False

    @property
    def value(self) -> float:
        return math.inf if self.diverged else self.trailing_min

    def affine(self, scale: float, offset: float = 0.0) -> "DerivativeEstimate":
        return DerivativeEstimate(
            self.eps, scale * self.quotients + offset, scale * self.trailing_min + offset,
            scale * self.richardson + offset, self.diverged,
        )


def _estimate(eps: np.ndarray, quotients: np.ndarray) -> DerivativeEstimate:
    q = np.asarray(quotients, dtype=float)
    tail = q[-3:]
    rich = float(2.0 * q[-1] - q[-2])
    # A quotient that keeps doubling as eps halves grows like 1/eps.
    ratios = np.abs(tail[1:]) / np.maximum(np.abs(tail[:-1]), 1e-300)
    diverged = bool(np.all(ratios > 1.5) and abs(tail[-1]) * eps[-1] > 1e-3 * max(abs(q[0]) * eps[0], 1e-300))
    return DerivativeEstimate(np.asarray(eps), q, float(tail.min()), rich, diverged)


def _cell_rule(dim: int, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(CELL_ORDER)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    offs = np.stack([g.ravel() for g in grids], axis=1) * (0.5 * h)
    wts = np.prod(np.meshgrid(*([w] * dim), indexing="ij"), axis=0).ravel() * 0.5**dim
    return offs, wts


def cell_integral(mu: Density, f: GridFunction) -> float:
    """Integral of the piecewise-constant f against mu, each cell by Gauss-Legendre."""
    if f.dim != mu.dim:
        raise ValueError("dimension mismatch")
    m = f.mask
    if not m.any():
        return 0.0
    vol = f.grid.cell_volume
    if mu.is_lebesgue:
        return float(np.sum(f.values[m]) * vol)
    centers = f.grid.centers()[m]
    offs, wts = _cell_rule(f.dim, np.asarray(f.grid.step))
    pts = (centers[:, None, :] + offs[None, :, :]).reshape(-1, f.dim)
    cell_mass = mu(pts).reshape(len(centers), -1) @ wts
    return float(np.sum(f.values[m] * cell_mass) * vol)


def surface_area(mu: Density, f: GridFunction, g: GridFunction, p: float, s: float,
                 sched: EpsSchedule = EpsSchedule(), lambda_grid: int = 129,
                 kernel: str = "pruned", refine: int = 0) -> DerivativeEstimate:
    """Quotients [int f (+)_{p,s} (eps x g) dmu - int f dmu] / eps."""
    params = ConvolutionParams(p, 0.5, s, lambda_grid)
    base = cell_integral(mu, f)
    eps = sched.values
    q = []
    for e in eps:
        h = oplus_ps(f, g, params, 1.0, float(e), kernel=kernel, refine=refine)
        q.append((cell_integral(mu, h) - base) / e)
    return _estimate(eps, np.array(q))


def mixed_volume_VpF(mu: Density, F: FSpec, A: SupportBody, B: SupportBody, p: float,
                     sched: EpsSchedule = EpsSchedule()) -> DerivativeEstimate:
    """F'(1) times the quotients [mu(A +_p eps ._p B) - mu(A)] / eps."""
    base = body_measure(mu, A)
    eps = sched.values
    q = np.array([(body_measure(mu, firey_combine(A, B, p, 1.0, float(e))) - base) / e for e in eps])
    return _estimate(eps, q).affine(F.derivative(1.0))


def residual_MpF(mu: Density, F: FSpec, A: SupportBody, p: float,
                 sched: EpsSchedule = EpsSchedule()) -> DerivativeEstimate:
    """mu(A) / F'(1) minus the left derivative of eps -> mu(eps ._p A) at 1."""
    base = body_measure(mu, A)
    if base == 0:
        eps = sched.values
        return _estimate(eps, np.zeros(len(eps)))
    eps = sched.values
    q = np.array([(base - body_measure(mu, A.lp_scale(1.0 - float(e), p))) / e for e in eps])
    return _estimate(eps, q).affine(-1.0, base / F.derivative(1.0))


@dataclass(frozen=True)
class FConcavityReport:
    worst_margin: float
    worst_instance: tuple
    evaluations: int


def _midpoint_margins(values: Sequence[float]) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return v[1:-1] - 0.5 * (v[:-2] + v[2:])


def check_F_concavity(mu: Density, F: FSpec, pairs: Iterable[tuple], p: float, s: float,
                      t_grid: Sequence[float], eps_grid: Optional[Sequence[float]] = None,
                      lambda_grid: int = 129) -> FConcavityReport:
    """Worst F(mu(combination)) - [(1-t) F(mu f) + t F(mu g)] over pairs and t.

    Pairs of GridFunctions use the supremal convolution; pairs of SupportBody
    use the Firey combination, and additionally the midpoint concavity of
    eps -> F(mu(eps ._p A)) and eps -> F(mu(A +_p eps ._p B)) is tested.
    """
    eps_grid = np.asarray(eps_grid if eps_grid is not None else np.linspace(0.25, 2.0, 8))
    worst, where, count = math.inf, (), 0
    for k, (A, B) in enumerate(pairs):
        bodies = isinstance(A, SupportBody)
        if bodies:
            mA, mB = body_measure(mu, A), body_measure(mu, B)
        else:
            mA, mB = cell_integral(mu, A), cell_integral(mu, B)
        FA, FB = F(mA), F(mB)
        for t in t_grid:
            t = float(t)
            if t in (0.0, 1.0):
                m = 0.0
            elif bodies:
                m = F(body_measure(mu, firey_combine(A, B, p, 1.0 - t, t))) - ((1 - t) * FA + t * FB)
            else:
                h = sup_convolution(A, B, ConvolutionParams(p, t, s, lambda_grid))
                m = F(cell_integral(mu, h)) - ((1 - t) * FA + t * FB)
            count += 1
            if m < worst:
                worst, where = m, (k, "t", t)
        if bodies and len(eps_grid) >= 3:
            for label, seq in (
                ("scale", [F(body_measure(mu, A.lp_scale(float(e), p))) for e in eps_grid]),
                ("sum", [F(body_measure(mu, firey_combine(A, B, p, 1.0, float(e)))) for e in eps_grid]),
            ):
                mm = _midpoint_margins(seq)
                count += len(mm)
                i = int(np.argmin(mm))
                if mm[i] < worst:
                    worst, where = float(mm[i]), (k, label, float(eps_grid[i + 1]))
    return FConcavityReport(float(worst), where, count)
