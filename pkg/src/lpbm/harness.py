"""Theorem registry: evaluates both sides of each inequality on fixtures."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .densities import ConcavityClass, Density, Quadrature, body_measure, classify_concavity
from .functionals import (
    EpsSchedule,
    FSpec,
    cell_integral,
    mixed_volume_VpF,
    residual_MpF,
    surface_area,
)
from .geometry import (
    DEFAULT_LAMBDA_GRID,
    SampledSet,
    SupportBody,
    firey_combine,
    is_weakly_unconditional,
    lambda_values,
    lyz_combine,
    minkowski_combine,
    rasterize_points,
    weight_table,
)
from .grid import Grid, GridFunction
from .means import combination_weights, mean
from .supconv import Combine, ConvolutionParams, lambda_set, sup_convolution

TAU_FACTOR = 4.0
ANALYTIC_RTOL = 1e-9
GZ_C_BOUND = 10.0
RADIAL_DECAY_CONSTANT = 0.5


class TheoremId(Enum):
    BBL = "BBL"
    LP_BBL = "LP_BBL"
    LP_BMI_SETS = "LP_BMI_SETS"
    LP_BMI_SCONCAVE = "LP_BMI_SCONCAVE"
    LP_PLI_PRODUCT = "LP_PLI_PRODUCT"
    LP_PLI_SETS = "LP_PLI_SETS"
    LP_BMI_PRODUCT = "LP_BMI_PRODUCT"
    LEMMA_1D = "LEMMA_1D"
    PL_RECOVERY = "PL_RECOVERY"
    MFI = "MFI"
    ISMI = "ISMI"
    GZ_PRODUCT_MIN = "GZ_PRODUCT_MIN"
    GZ_LP_PRODUCT = "GZ_LP_PRODUCT"
    GZ_LOGCONCAVE_C = "GZ_LOGCONCAVE_C"
    GZ_RADIAL_DECAY = "GZ_RADIAL_DECAY"

    @classmethod
    def parse(cls, name: str) -> "TheoremId":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown theorem id {name!r}") from None


@dataclass(frozen=True, eq=False)
class Fixture:
    """Inputs for a check: a measure plus functions, sets or convex bodies."""

    name: str
    mu: Density
    f: Optional[GridFunction] = None
    g: Optional[GridFunction] = None
    A: Optional[SampledSet] = None
    B: Optional[SampledSet] = None
    K: Optional[SupportBody] = None
    L: Optional[SupportBody] = None

    @property
    def dim(self) -> int:
        return self.mu.dim


@dataclass(frozen=True)
class CheckParams:
    p: float
    t: float
    s: float = 1.0
    lam: Optional[float] = None
    lambda_grid: int = DEFAULT_LAMBDA_GRID
    tolerance_scale: float = 1.0
    kernel: str = "pruned"
    sched: EpsSchedule = EpsSchedule()

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError("t must lie in [0, 1]")
        if self.s < 0 or math.isnan(self.s):
            raise ValueError("s must lie in [0, inf]")
        if self.tolerance_scale <= 0:
            raise ValueError("tolerance scale must be positive")


@dataclass(frozen=True)
class CheckReport:
    theorem: TheoremId
    fixture: str
    p: float
    t: float
    lam: float
    s: float
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    passed: bool
    hypothesis_violations: tuple = ()
    notes: str = ""

    @property
    def applicable(self) -> bool:
        return not self.hypothesis_violations


# ---------------------------------------------------------------------------
# hypothesis predicates
# ---------------------------------------------------------------------------


def max_at_origin(f: GridFunction, rtol: float = 1e-12) -> bool:
    if f.is_empty():
        return False
    v0 = float(f.at(np.zeros((1, f.dim)))[0])
    return v0 >= f.sup * (1.0 - rtol)


def equal_sups(f: GridFunction, g: GridFunction, rtol: float = 1e-12) -> bool:
    return abs(f.sup - g.sup) <= rtol * max(f.sup, g.sup)


def function_weakly_unconditional(f: GridFunction) -> bool:
    """f(eps x) >= f(x) for every 0/1 pattern eps, checked on cell centers."""
    pts = f.grid.points()
    vals = f.values.reshape(-1)
    keep = vals > 0
    pts, vals = pts[keep], vals[keep]
    n = f.dim
    for k in range(1, n + 1):
        for S in itertools.combinations(range(n), k):
            z = pts.copy()
            z[:, list(S)] = 0.0
            if np.any(f.at(z) < vals * (1 - 1e-12)):
                return False
    return True


def positively_decreasing(f: GridFunction) -> bool:
    """Nonincreasing in |x_i| along every axis on each side of the origin."""
    v = f.values
    for ax in range(f.dim):
        c = f.grid.axis_centers(ax)
        pos = np.nonzero(c >= 0)[0]
        neg = np.nonzero(c <= 0)[0][::-1]
        for idx in (pos, neg):
            if len(idx) < 2:
                continue
            seq = np.take(v, idx, axis=ax)
            if np.any(np.diff(seq, axis=ax) > 1e-12 * max(f.sup, 1e-300)):
                return False
    return True


def product_level_sets(f: GridFunction, max_levels: int = 64) -> bool:
    """Every sampled super-level set is a product of 1-d masks containing the origin."""
    levels = np.unique(f.values[f.values > 0])
    if len(levels) > max_levels:
        levels = levels[np.linspace(0, len(levels) - 1, max_levels).astype(int)]
    origin_idx, inside = f.grid.cell_index(np.zeros((1, f.dim)))
    if not inside[0]:
        return False
    n = f.dim
    for r in levels:
        m = f.values >= r
        proj = [np.any(m, axis=tuple(a for a in range(n) if a != ax)) if n > 1 else m for ax in range(n)]
        prod = proj[0]
        for pj in proj[1:]:
            prod = np.multiply.outer(prod, pj)
        if not np.array_equal(prod.astype(bool), m):
            return False
        if not all(proj[ax][origin_idx[0, ax]] for ax in range(n)):
            return False
    return True


def set_contains_origin(A: SampledSet) -> bool:
    if A.mask is not None:
        idx, inside = A.grid.cell_index(np.zeros((1, A.dim)))
        return bool(inside[0] and A.mask[tuple(idx[0])])
    return bool(np.min(np.linalg.norm(A.points, axis=1)) <= 1e-12)


def density_in_class(mu: Density, cls: ConcavityClass, s: Optional[float] = None,
                     q: Optional[Quadrature] = None) -> bool:
    """Declared class membership backed by a sampled midpoint test."""
    if mu.is_lebesgue:
        return True
    if not mu.satisfies(cls, s):
        return False
    q = q or Quadrature.default_for(mu, resolution=32)
    return classify_concavity(mu, q, cls, s, samples=4000).ok


def has_radial_decay(mu: Density, bodies: Sequence[SupportBody],
                     r_grid: Sequence[float] = (0.25, 0.5, 0.75, 0.9)) -> bool:
    """mu(r K) >= r^n mu(K) for the given bodies and r grid."""
    n = mu.dim
    for K in bodies:
        base = body_measure(mu, K)
        for r in r_grid:
            if body_measure(mu, K.dilate(r)) < r**n * base * (1 - 1e-10):
                return False
    return True


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _step_of(*objs) -> float:
    h = 0.0
    for o in objs:
        if isinstance(o, GridFunction):
            h = max(h, o.grid.max_step)
        elif isinstance(o, SampledSet) and o.grid is not None:
            h = max(h, o.grid.max_step)
    return h


def _body_step(K: SupportBody) -> float:
    if K.dim == 1:
        return ANALYTIC_RTOL / TAU_FACTOR
    return 2.0 * math.pi / len(K.directions)


def _tolerance(h: float, scale: float, lhs: float, rhs: float) -> float:
    mag = max(abs(lhs), abs(rhs))
    if not math.isfinite(mag):
        return 0.0
    return TAU_FACTOR * h * scale * mag


def _set_measure(mu: Density, A: SampledSet) -> float:
    if A.mask is None:
        raise ValueError("set needs a grid mask")
    return cell_integral(mu, GridFunction.indicator(A.grid, A.mask))


def _combination_grid(A: SampledSet, B: SampledSet, pairs: np.ndarray) -> Grid:
    ref = A.grid if A.grid.max_step <= B.grid.max_step else B.grid
    h = ref.step
    amin, amax = A.points.min(0), A.points.max(0)
    bmin, bmax = B.points.min(0), B.points.max(0)
    lo = np.full(A.dim, np.inf)
    hi = np.full(A.dim, -np.inf)
    for a, b in pairs:
        lo = np.minimum(lo, np.minimum(a * amin, a * amax) + np.minimum(b * bmin, b * bmax))
        hi = np.maximum(hi, np.maximum(a * amin, a * amax) + np.maximum(b * bmin, b * bmax))
    base = np.array(ref.lo)
    ilo = np.floor((lo - base) / h + 1e-9).astype(int) - 1
    ihi = np.ceil((hi - base) / h - 1e-9).astype(int) + 1
    return Grid(tuple(base + ilo * h), tuple(base + ihi * h), tuple(ihi - ilo))


def lp_set_combination(A: SampledSet, B: SampledSet, p: float, t: float,
                       lambda_grid: int = DEFAULT_LAMBDA_GRID) -> SampledSet:
    """(1-t) ._p A +_p t ._p B rasterized on a grid aligned with the finer input."""
    if t == 0.0:
        return A
    if t == 1.0:
        return B
    table = weight_table(p, 1.0 - t, t, lambda_values(lambda_grid))
    grid = _combination_grid(A, B, np.unique(table[:, 1:], axis=0))
    return lyz_combine(A, B, p, 1.0 - t, t, lambda_grid=lambda_grid, grid=grid)


def _mean_exponent(p: float, n: int, s: float) -> float:
    return 0.0 if math.isinf(s) else p / (n + s)


def _conv(f, g, params: CheckParams, s: float, rule: Optional[Combine] = None) -> GridFunction:
    cp = ConvolutionParams(params.p, params.t, s, params.lambda_grid, rule)
    return sup_convolution(f, g, cp, kernel=params.kernel)


def _holder_bracket(t: float, lam: float, n: int, p: float) -> float:
    return (((1 - t) / (1 - lam)) ** (1 - lam) * (t / lam) ** lam) ** (n / p)


def _pli_lambdas(f: GridFunction, g: GridFunction, params: CheckParams) -> np.ndarray:
    t = params.t
    if params.p == 1.0:
        return np.array([t])
    cp = ConvolutionParams(params.p, t, math.inf, params.lambda_grid)
    lams = lambda_set(f, g, cp, 1.0 - t, t)
    lams = lams[(lams > 0) & (lams < 1)]
    return lams if len(lams) else np.array([t])


def pli_rhs(mu: Density, f: GridFunction, g: GridFunction, params: CheckParams) -> tuple[float, float]:
    """Supremum over the lambda set of the bracketed product; returns (value, argmax lambda)."""
    t, p, n = params.t, params.p, f.dim
    best, arg = -math.inf, float("nan")
    for lam in _pli_lambdas(f, g, params):
        lam = float(lam)
        If = cell_integral(mu, f.power(((1 - t) / (1 - lam)) ** (1 / p)))
        Ig = cell_integral(mu, g.power((t / lam) ** (1 / p)))
        val = _holder_bracket(t, lam, n, p) * If ** (1 - lam) * Ig**lam
        if val > best:
            best, arg = val, lam
    return best, arg


# ---------------------------------------------------------------------------
# per-theorem evaluators: each returns (lhs, rhs, h, violations, notes, lam, s)
# ---------------------------------------------------------------------------


def _need(fx: Fixture, *names) -> list:
    return [f"fixture lacks {n}" for n in names if getattr(fx, n) is None]


def _dims(fx: Fixture, *names) -> list:
    for n in names:
        obj = getattr(fx, n)
        if obj is not None and obj.dim != fx.dim:
            raise ValueError(f"dimension mismatch between the measure and {n}")
    return []


def _eval_bbl(fx: Fixture, pr: CheckParams, lp: bool):
    v = _need(fx, "f", "g")
    if not fx.mu.is_lebesgue:
        v.append("measure must be Lebesgue")
    if not lp and pr.p != 1.0:
        v.append("classical form needs p = 1")
    if v:
        return None, v
    n = fx.dim
    h = _conv(fx.f, fx.g, pr, pr.s)
    lhs = cell_integral(fx.mu, h)
    If, Ig = cell_integral(fx.mu, fx.f), cell_integral(fx.mu, fx.g)
    rhs = mean(_mean_exponent(pr.p, n, pr.s), pr.t, If, Ig)
    return (lhs, rhs, _step_of(fx.f, fx.g), "", float("nan"), pr.s), []


def _eval_bmi_sets(fx: Fixture, pr: CheckParams):
    v = _need(fx, "A", "B")
    if not fx.mu.is_lebesgue:
        v.append("measure must be Lebesgue")
    if v:
        return None, v
    C = lp_set_combination(fx.A, fx.B, pr.p, pr.t, pr.lambda_grid)
    mA, mB = _set_measure(fx.mu, fx.A), _set_measure(fx.mu, fx.B)
    lhs = _set_measure(fx.mu, C)
    rhs = mean(pr.p / fx.dim, pr.t, mA, mB)
    return (lhs, rhs, _step_of(fx.A, fx.B), "", float("nan"), 0.0), []


def _eval_bmi_sconcave(fx: Fixture, pr: CheckParams):
    v = _need(fx, "A", "B")
    mu = fx.mu
    s = 0.0 if mu.is_lebesgue else mu.s
    if not mu.is_lebesgue:
        if s is None or not density_in_class(mu, ConcavityClass.S_CONCAVE, s):
            v.append("density is not (1/s)-concave")
        elif math.isinf(s):
            v.append("s must be finite")
        elif float(mu(np.zeros((1, mu.dim)))[0]) <= 0:
            v.append("density support must contain the origin")
    if v:
        return None, v
    C = lp_set_combination(fx.A, fx.B, pr.p, pr.t, pr.lambda_grid)
    mA, mB = _set_measure(mu, fx.A), _set_measure(mu, fx.B)
    lhs = _set_measure(mu, C)
    rhs = mean(pr.p / (fx.dim + s), pr.t, mA, mB)
    note = ""
    if not mu.is_lebesgue and np.any(mu(C.points) <= 0):
        note = "density extended by zero outside its support"
    return (lhs, rhs, _step_of(fx.A, fx.B), note, float("nan"), s), []


def _product_measure_violations(mu: Density) -> list:
    if mu.is_lebesgue:
        return []
    if not density_in_class(mu, ConcavityClass.QUASI_CONCAVE_PRODUCT):
        return ["density is not a product of quasi-concave factors with maximum at the origin"]
    return []


def _eval_pli_product(fx: Fixture, pr: CheckParams, classical: bool = False):
    v = _need(fx, "f", "g") + (_product_measure_violations(fx.mu) if not classical else [])
    if classical:
        if pr.p != 1.0:
            v.append("recovery needs p = 1")
        if not fx.mu.is_lebesgue and not density_in_class(fx.mu, ConcavityClass.LOG_CONCAVE):
            v.append("measure must be Lebesgue or log-concave")
    if not v:
        for name in ("f", "g"):
            fn = getattr(fx, name)
            if not classical and not function_weakly_unconditional(fn):
                v.append(f"{name} is not weakly unconditional")
            if not classical and not positively_decreasing(fn):
                v.append(f"{name} is not positively decreasing")
    if v:
        return None, v
    t = pr.t
    h = _conv(fx.f, fx.g, pr, math.inf)
    lhs = cell_integral(fx.mu, h)
    if t in (0.0, 1.0):
        rhs = cell_integral(fx.mu, fx.f if t == 0 else fx.g)
        return (lhs, rhs, _step_of(fx.f, fx.g), "", t, math.inf), []
    rhs, lam = pli_rhs(fx.mu, fx.f, fx.g, pr)
    notes = ""
    if classical:
        If, Ig = cell_integral(fx.mu, fx.f), cell_integral(fx.mu, fx.g)
        pl = If ** (1 - t) * Ig**t
        spread = 0.0
        for lg in (17, 65, pr.lambda_grid):
            r, _ = pli_rhs(fx.mu, fx.f, fx.g, replace(pr, lambda_grid=lg))
            spread = max(spread, abs(r - pl) / max(abs(pl), 1e-300))
        notes = f"lambda_grid_spread={spread:.3e}"
        if spread > ANALYTIC_RTOL:
            v.append("right side depends on the lambda grid")
    return (lhs, rhs, _step_of(fx.f, fx.g), notes, lam, math.inf), v


def _set_lambda_grid(pr: CheckParams) -> np.ndarray:
    lams = lambda_values(pr.lambda_grid)
    lams = lams[(lams > 0) & (lams < 1)]
    return np.unique(np.append(lams, pr.t)) if pr.p > 1 else np.array([pr.t])


def _eval_pli_sets(fx: Fixture, pr: CheckParams, bmi: bool):
    v = _need(fx, "A", "B") + _product_measure_violations(fx.mu)
    if bmi and pr.p <= 1.0:
        v.append("needs p > 1")
    if not v:
        for name in ("A", "B"):
            if not is_weakly_unconditional(getattr(fx, name)):
                v.append(f"{name} is not weakly unconditional")
    if v:
        return None, v
    t, p, n = pr.t, pr.p, fx.dim
    C = lp_set_combination(fx.A, fx.B, p, t, pr.lambda_grid)
    mA, mB, mC = (_set_measure(fx.mu, X) for X in (fx.A, fx.B, C))
    h = _step_of(fx.A, fx.B)
    if bmi:
        return (mC ** (p / n), (1 - t) * mA ** (p / n) + t * mB ** (p / n), h, "", float("nan"), 0.0), []
    if t in (0.0, 1.0):
        return (mC, mA if t == 0 else mB, h, "", t, 0.0), []
    best, arg = -math.inf, t
    for lam in _set_lambda_grid(pr):
        val = _holder_bracket(t, lam, n, p) * mA ** (1 - lam) * mB**lam
        if val > best:
            best, arg = val, float(lam)
    return (mC, best, h, "", arg, 0.0), []


def _eval_lemma_1d(fx: Fixture, pr: CheckParams):
    v = _need(fx, "A", "B")
    if fx.dim != 1:
        v.append("needs dimension 1")
    v += _product_measure_violations(fx.mu)
    if not v:
        for name in ("A", "B"):
            if not set_contains_origin(getattr(fx, name)):
                v.append(f"{name} must contain the origin")
    if v:
        return None, v
    t, p = pr.t, pr.p
    lams = [pr.lam] if pr.lam is not None else list(lambda_values(pr.lambda_grid))
    mA, mB = _set_measure(fx.mu, fx.A), _set_measure(fx.mu, fx.B)
    worst = None
    for lam in lams:
        a, b = combination_weights(p, 1.0 - t, t, float(lam))
        pts = minkowski_combine(fx.A, fx.B, a, b).points
        grid = _combination_grid(fx.A, fx.B, np.array([[a, b]]))
        S = SampledSet.from_mask(grid, rasterize_points(pts, grid))
        lhs = _set_measure(fx.mu, S)
        rhs = a * mA + b * mB
        if worst is None or lhs - rhs < worst[0] - worst[1]:
            worst = (lhs, rhs, float(lam))
    return (worst[0], worst[1], _step_of(fx.A, fx.B), "", worst[2], 0.0), []


def _mfi_F(mu: Density, n: int, p: float, s: float) -> tuple[Optional[FSpec], str]:
    if math.isinf(s):
        if mu.is_lebesgue or density_in_class(mu, ConcavityClass.LOG_CONCAVE):
            return FSpec.log(), "F=log"
        return None, "s = inf needs a log-concave measure"
    if mu.is_lebesgue:
        return FSpec.power(p / (n + s)), f"F=t^{p / (n + s):.6g}"
    return None, "finite s needs the Lebesgue measure"


def _eval_mfi(fx: Fixture, pr: CheckParams):
    v = _need(fx, "f", "g")
    if v:
        return None, v
    n, p, s = fx.dim, pr.p, pr.s
    F, label = _mfi_F(fx.mu, n, p, s)
    if F is None:
        return None, [label]
    kw = dict(sched=pr.sched, lambda_grid=pr.lambda_grid, kernel=pr.kernel)
    Sfg = surface_area(fx.mu, fx.f, fx.g, p, s, **kw)
    Sff = surface_area(fx.mu, fx.f, fx.f, p, s, **kw)
    If, Ig = cell_integral(fx.mu, fx.f), cell_integral(fx.mu, fx.g)
    lhs = Sfg.value
    rhs = Sff.value + (F(Ig) - F(If)) / F.derivative(If)
    h = max(_step_of(fx.f, fx.g), pr.sched.smallest)
    return (lhs, rhs, h, label, float("nan"), s), []


def _ismi_F(mu: Density, K: SupportBody, L: SupportBody, n: int, p: float) -> tuple[Optional[FSpec], str]:
    if mu.is_lebesgue:
        return FSpec.power(p / n), f"F=t^{p / n:.6g}"
    if mu.satisfies(ConcavityClass.S_CONCAVE) and mu.s is not None and math.isfinite(mu.s) \
            and density_in_class(mu, ConcavityClass.S_CONCAVE, mu.s):
        return FSpec.power(p / (n + mu.s)), f"F=t^{p / (n + mu.s):.6g}"
    if density_in_class(mu, ConcavityClass.LOG_CONCAVE):
        return FSpec.log(), "F=log"
    return None, "measure is neither (1/s)-concave nor log-concave"


def _eval_ismi(fx: Fixture, pr: CheckParams):
    v = _need(fx, "K", "L")
    if v:
        return None, v
    K, L = fx.K, fx.L
    if not (K.origin_interior and L.origin_interior):
        return None, ["bodies must contain the origin in their interiors"]
    n, p = fx.dim, pr.p
    F, label = _ismi_F(fx.mu, K, L, n, p)
    if F is None:
        return None, [label]
    V = mixed_volume_VpF(fx.mu, F, K, L, p, pr.sched)
    M = residual_MpF(fx.mu, F, K, p, pr.sched)
    mK, mL = body_measure(fx.mu, K), body_measure(fx.mu, L)
    d1 = F.derivative(1.0)
    lhs = V.value + d1 * M.value
    rhs = d1 * (F(mL) - F(mK)) / F.derivative(mK) + mK
    h = max(_body_step(K), pr.sched.smallest)
    return (lhs, rhs, h, label, float("nan"), 0.0), []


def _eval_gz_product(fx: Fixture, pr: CheckParams, lp: bool):
    v = _need(fx, "f", "g") + _product_measure_violations(fx.mu)
    if not 0.0 < pr.t < 1.0:
        v.append("needs 0 < t < 1")
    if not lp and pr.p != 1.0:
        v.append("min condition needs p = 1")
    if not v:
        for name in ("f", "g"):
            fn = getattr(fx, name)
            if not max_at_origin(fn):
                v.append(f"{name} does not attain its maximum at the origin")
            if not product_level_sets(fn):
                v.append(f"{name} has super-level sets that are not products containing the origin")
        if not equal_sups(fx.f, fx.g):
            v.append("sup norms differ")
    if v:
        return None, v
    n = fx.dim
    if lp:
        h = _conv(fx.f, fx.g, pr, 1.0)
    else:
        h = _conv(fx.f, fx.g, pr, 1.0, rule=Combine.MIN)
    lhs = cell_integral(fx.mu, h)
    If, Ig = cell_integral(fx.mu, fx.f), cell_integral(fx.mu, fx.g)
    rhs = ((1 - pr.t) * If ** (1 / n) + pr.t * Ig ** (1 / n)) ** n
    return (lhs, rhs, _step_of(fx.f, fx.g), "", float("nan"), 1.0), []


def _body_combination(K: SupportBody, L: SupportBody, p: float, t: float) -> SupportBody:
    if t == 0.0:
        return K
    if t == 1.0:
        return L
    return firey_combine(K, L, p, 1.0 - t, t)


def gz_ratio(mu: Density, K: SupportBody, L: SupportBody, p: float, t: float) -> float:
    """([(1-t) mu(K)^{p/n} + t mu(L)^{p/n}] / mu(comb)^{p/n})^{1/p}."""
    n = mu.dim
    mC = body_measure(mu, _body_combination(K, L, p, t))
    mK, mL = body_measure(mu, K), body_measure(mu, L)
    if mC <= 0:
        raise ZeroDivisionError("combination has zero measure")
    return (((1 - t) * mK ** (p / n) + t * mL ** (p / n)) / mC ** (p / n)) ** (1 / p)


def _eval_gz_bodies(fx: Fixture, pr: CheckParams, radial: bool):
    v = _need(fx, "K", "L")
    if v:
        return None, v
    K, L, mu = fx.K, fx.L, fx.mu
    if not (K.origin_interior and L.origin_interior):
        return None, ["bodies must contain the origin in their interiors"]
    if radial:
        if not has_radial_decay(mu, (K, L)):
            return None, ["measure lacks radial decay on these bodies"]
    elif not density_in_class(mu, ConcavityClass.LOG_CONCAVE):
        return None, ["measure is not log-concave"]
    n, p, t = fx.dim, pr.p, pr.t
    mC = body_measure(mu, _body_combination(K, L, p, t))
    mK, mL = body_measure(mu, K), body_measure(mu, L)
    bracket = (1 - t) * mK ** (p / n) + t * mL ** (p / n)
    lhs = mC ** (p / n)
    if radial:
        rhs = RADIAL_DECAY_CONSTANT * bracket
        notes = ""
    else:
        rhs = bracket / GZ_C_BOUND**p
        ratio = (bracket / lhs) ** (1 / p) if lhs > 0 else math.inf
        notes = f"ratio={ratio:.12g}"
    h = max(_body_step(K), _body_step(L))
    return (lhs, rhs, h, notes, float("nan"), math.inf), []


_EVALUATORS: dict[TheoremId, Callable] = {
    TheoremId.BBL: lambda fx, pr: _eval_bbl(fx, pr, lp=False),
    TheoremId.LP_BBL: lambda fx, pr: _eval_bbl(fx, pr, lp=True),
    TheoremId.LP_BMI_SETS: _eval_bmi_sets,
    TheoremId.LP_BMI_SCONCAVE: _eval_bmi_sconcave,
    TheoremId.LP_PLI_PRODUCT: lambda fx, pr: _eval_pli_product(fx, pr),
    TheoremId.LP_PLI_SETS: lambda fx, pr: _eval_pli_sets(fx, pr, bmi=False),
    TheoremId.LP_BMI_PRODUCT: lambda fx, pr: _eval_pli_sets(fx, pr, bmi=True),
    TheoremId.LEMMA_1D: _eval_lemma_1d,
    TheoremId.PL_RECOVERY: lambda fx, pr: _eval_pli_product(fx, pr, classical=True),
    TheoremId.MFI: _eval_mfi,
    TheoremId.ISMI: _eval_ismi,
    TheoremId.GZ_PRODUCT_MIN: lambda fx, pr: _eval_gz_product(fx, pr, lp=False),
    TheoremId.GZ_LP_PRODUCT: lambda fx, pr: _eval_gz_product(fx, pr, lp=True),
    TheoremId.GZ_LOGCONCAVE_C: lambda fx, pr: _eval_gz_bodies(fx, pr, radial=False),
    TheoremId.GZ_RADIAL_DECAY: lambda fx, pr: _eval_gz_bodies(fx, pr, radial=True),
}


def check_inequality(theorem: TheoremId | str, fixture: Fixture, params: CheckParams) -> CheckReport:
    """Evaluate both sides of the inequality and compare at tolerance tau."""
    if isinstance(theorem, str):
        theorem = TheoremId.parse(theorem)
    if theorem not in _EVALUATORS:
        raise ValueError(f"unknown theorem id {theorem!r}")
    _dims(fixture, "f", "g", "A", "B", "K", "L")
    result, violations = _EVALUATORS[theorem](fixture, params)
    nan = float("nan")
    if result is None:
        return CheckReport(theorem, fixture.name, params.p, params.t,
                           params.lam if params.lam is not None else nan, params.s,
                           nan, nan, nan, 0.0, False, tuple(violations), "inapplicable")
    lhs, rhs, h, notes, lam, s = result
    margin = lhs - rhs
    tol = max(_tolerance(h, params.tolerance_scale, lhs, rhs),
              ANALYTIC_RTOL * params.tolerance_scale * max(abs(lhs), abs(rhs), 1e-300))
    if math.isnan(margin):
        ok = False
    elif math.isinf(lhs) and lhs > 0:
        ok = True
    else:
        ok = margin >= -tol
    return CheckReport(theorem, fixture.name, params.p, params.t, lam, s, float(lhs), float(rhs),
                       float(margin), float(tol), bool(ok and not violations), tuple(violations), notes)


def sweep(theorem: TheoremId | str, fixtures: Iterable[Fixture], p_grid: Sequence[float],
          t_grid: Sequence[float], s_grid: Sequence[float] = (1.0,),
          base: Optional[CheckParams] = None) -> list[CheckReport]:
    """One report per (fixture, p, t, s), in lexicographic index order."""
    base = base or CheckParams(1.0, 0.5)
    out = []
    for fx in fixtures:
        for p, t, s in itertools.product(p_grid, t_grid, s_grid):
            out.append(check_inequality(theorem, fx, replace(base, p=float(p), t=float(t), s=float(s))))
    return out


@dataclass(frozen=True)
class GZEstimate:
    C: float
    witness: Optional[tuple]
    instances: int
    skipped: tuple = field(default=())


def estimate_gz_constant(family: Iterable[Fixture], p_grid: Sequence[float],
                         t_grid: Sequence[float]) -> GZEstimate:
    """Largest ratio over log-concave body instances; C >= 1 by convention."""
    best, witness, count, skipped = 1.0, None, 0, []
    for fx in family:
        if fx.K is None or fx.L is None:
            raise ValueError(f"fixture {fx.name} lacks bodies")
        if not density_in_class(fx.mu, ConcavityClass.LOG_CONCAVE):
            raise ValueError(f"measure of fixture {fx.name} is not log-concave")
        for p, t in itertools.product(p_grid, t_grid):
            try:
                r = gz_ratio(fx.mu, fx.K, fx.L, float(p), float(t))
            except ZeroDivisionError:
                skipped.append(f"{fx.name}: zero-measure combination at p={p}, t={t}")
                continue
            count += 1
            if witness is None or r > witness[3]:
                witness = (fx.name, float(p), float(t), r)
    if witness is not None:
        best = max(best, witness[3])
    return GZEstimate(max(1.0, best), witness, count, tuple(skipped))
