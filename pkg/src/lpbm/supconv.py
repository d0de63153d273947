"""The L_{p,s} supremal convolution and the matching scalar action.

Inputs are treated as functions constant on grid cells; the kernel returns
the exact supremum for such inputs over a finite lambda set.  The exponent
``s`` selects the combination rule of the inner mean:

* ``0 < s < inf``: ``[a f^{1/s} + b g^{1/s}]^s``
* ``s = 0``:       ``max(f, g)`` over the terms with positive weight
* ``s = inf``:     ``f^a g^b`` (log-concave case)

A fourth rule, ``min(f, g)``, is available through ``Combine.MIN`` for the
quasi-concave setting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import ndimage

from . import _kernel
from .geometry import DEFAULT_LAMBDA_GRID, lambda_values
from .grid import Grid, GridFunction
from .means import combination_weights

__all__ = [
    "Combine",
    "ConvolutionParams",
    "GridFunction",
    "combine_rule",
    "lambda_set",
    "oplus_ps",
    "evaluate_oplus",
    "sup_convolution",
    "scale_ps",
    "check_concavity_preservation",
]


class Combine(Enum):
    POWER = _kernel.RULE_POWER
    MAX = _kernel.RULE_MAX
    GEOMETRIC = _kernel.RULE_GEOMETRIC
    MIN = _kernel.RULE_MIN


def combine_rule(s: float) -> Combine:
    if s < 0 or math.isnan(s):
        raise ValueError(f"s must lie in [0, inf], got {s}")
    if s == 0:
        return Combine.MAX
    if math.isinf(s):
        return Combine.GEOMETRIC
    return Combine.POWER


@dataclass(frozen=True)
class ConvolutionParams:
    p: float
    t: float
    s: float
    lambda_grid: int = DEFAULT_LAMBDA_GRID
    rule: Optional[Combine] = None

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError("t must lie in [0, 1]")
        if self.lambda_grid < 2:
            raise ValueError("lambda grid needs at least two points")
        combine_rule(self.s)

    @property
    def combine(self) -> Combine:
        return self.rule if self.rule is not None else combine_rule(self.s)


# ---------------------------------------------------------------------------
# lambda sets and output grids
# ---------------------------------------------------------------------------


def _holder_node(p, alpha, beta, u, v):
    num = beta * v**p
    den = alpha * u**p + num
    return num / den if den > 0 else None


def lambda_set(f: GridFunction, g: GridFunction, params: ConvolutionParams,
               alpha: float, beta: float) -> np.ndarray:
    """Uniform lambda grid plus the Hoelder-optimal nodes for these inputs.

    A node beta v^p / (alpha u^p + beta v^p) maximizes a(lam) u + b(lam) v;
    it is added for the support extents along every axis and for the peak
    values, so extremal combinations are attained exactly.  For p = 1 the
    coefficients do not depend on lambda and a single node suffices.
    """
    p = params.p
    if p == 1:
        return np.array([0.5])
    lams = list(lambda_values(params.lambda_grid))
    if alpha > 0 and beta > 0:
        lams.append(beta / (alpha + beta))
        flo, fhi = f.support_box()
        glo, ghi = g.support_box()
        pairs = []
        for d in range(f.dim):
            pairs.append((fhi[d], ghi[d]))
            pairs.append((-flo[d], -glo[d]))
        if params.combine is Combine.POWER:
            pairs.append((f.sup ** (1.0 / params.s), g.sup ** (1.0 / params.s)))
        for u, v in pairs:
            if u > 0 and v > 0:
                node = _holder_node(p, alpha, beta, u, v)
                if node is not None:
                    lams.append(node)
    return np.unique(np.clip(np.array(lams), 0.0, 1.0))


def coefficient_table(lams: np.ndarray, p: float, alpha: float, beta: float) -> np.ndarray:
    return np.array([combination_weights(p, alpha, beta, float(l)) for l in lams]).reshape(-1, 2)


def output_grid(f: GridFunction, g: GridFunction, coeffs: np.ndarray) -> Grid:
    """Grid covering every combination a x + b y of the two supports.

    The cell count per axis equals the larger support count, so a dilation
    of the inputs is reproduced cell for cell; one padding cell is added on
    each side.
    """
    flo, fhi = f.support_box()
    glo, ghi = g.support_box()
    a, b = coeffs[:, 0:1], coeffs[:, 1:2]
    lo = np.min(a * flo + b * glo, axis=0)
    hi = np.max(a * fhi + b * ghi, axis=0)
    counts = np.maximum(f.support_counts(), g.support_counts())
    fallback = np.minimum(f.grid.step, g.grid.step) * max(1e-12, float(np.max(a + b)))
    step = np.where(hi > lo, (hi - lo) / np.maximum(counts, 1), fallback)
    lo = lo - step
    hi = np.where(hi > lo + step, hi, lo + step) + step
    n = np.rint((hi - lo) / step).astype(int)
    return Grid(tuple(lo), tuple(lo + n * step), tuple(int(v) for v in n))


# ---------------------------------------------------------------------------
# kernel plumbing
# ---------------------------------------------------------------------------


def _pad3(v, fill):
    out = np.full(3, fill, dtype=float)
    out[: len(v)] = v
    return out


def _pack(fn: GridFunction, pruned: bool):
    grid = fn.grid
    n = grid.dim
    vals = fn.values.reshape(grid.shape + (1,) * (3 - n))
    vals = np.ascontiguousarray(vals, dtype=float)
    lo = _pad3(np.array(grid.lo), -0.5)
    h = _pad3(grid.step, 1.0)
    shape = np.array(vals.shape, dtype=np.int64)
    idx = np.argwhere(vals > 0).astype(np.int64)
    cv = vals[tuple(idx.T)]
    if pruned:
        order = np.argsort(-cv, kind="stable")
        idx, cv = idx[order], cv[order]
    idx = np.ascontiguousarray(idx)
    ib_lo = idx.min(axis=0).astype(np.int64)
    ib_hi = idx.max(axis=0).astype(np.int64)
    bb_lo = lo + ib_lo * h
    bb_hi = lo + (ib_hi + 1) * h
    return (lo, h, shape, vals, idx, np.ascontiguousarray(cv), ib_lo, ib_hi, bb_lo, bb_hi,
            float(cv.max()))


def _run_kernel(f, g, coeffs, rule: Combine, s: float, points: np.ndarray, kernel: str):
    if kernel not in ("pruned", "naive"):
        raise ValueError(f"unknown kernel {kernel!r}")
    pruned = kernel == "pruned"
    _kernel.apply_thread_setting()
    fp = _pack(f, pruned)
    gp = _pack(g, pruned)
    A = np.ascontiguousarray(coeffs[:, 0])
    B = np.ascontiguousarray(coeffs[:, 1])
    if pruned:
        ub = np.array([_kernel.combine(rule.value, s, a, b, fp[-1], gp[-1]) for a, b in zip(A, B)])
        order = np.argsort(-ub, kind="stable")
        A, B = np.ascontiguousarray(A[order]), np.ascontiguousarray(B[order])
    Z = np.zeros((len(points), 3))
    Z[:, : f.dim] = points
    s_val = float(s) if rule is Combine.POWER else 1.0
    return _kernel.sup_kernel(Z, A, B, rule.value, s_val, *fp, *gp, pruned)


def _validate(f: GridFunction, g: GridFunction, alpha: float, beta: float):
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    if f.is_empty() or g.is_empty():
        raise ValueError("empty support")
    if alpha <= 0 or beta < 0:
        raise ValueError("scalars must be positive")


def evaluate_oplus(f: GridFunction, g: GridFunction, params: ConvolutionParams, alpha: float,
                   beta: float, points: np.ndarray, kernel: str = "pruned") -> np.ndarray:
    """Values of alpha.f (+) beta.g at arbitrary points."""
    _validate(f, g, alpha, beta)
    lams = lambda_set(f, g, params, alpha, beta)
    coeffs = coefficient_table(lams, params.p, alpha, beta)
    pts = np.asarray(points, dtype=float).reshape(-1, f.dim)
    return _run_kernel(f, g, coeffs, params.combine, params.s, pts, kernel)


def _boundary_cells(mask: np.ndarray) -> np.ndarray:
    edge = np.zeros_like(mask)
    for ax in range(mask.ndim):
        diff = np.diff(mask.astype(np.int8), axis=ax) != 0
        lo = [slice(None)] * mask.ndim
        hi = [slice(None)] * mask.ndim
        lo[ax] = slice(0, -1)
        hi[ax] = slice(1, None)
        edge[tuple(lo)] |= diff
        edge[tuple(hi)] |= diff
    return edge


def oplus_ps(f: GridFunction, g: GridFunction, params: ConvolutionParams, alpha: float,
             beta: float, kernel: str = "pruned", grid: Optional[Grid] = None,
             refine: int = 0) -> GridFunction:
    """alpha .f (+)_{p,s} beta .g sampled on an output grid.

    Values are taken at cell centers.  With ``refine = r > 1`` every cell on
    the boundary of the support is replaced by the mean over an r^n subgrid,
    which resolves the support boundary below the cell size.
    """
    _validate(f, g, alpha, beta)
    lams = lambda_set(f, g, params, alpha, beta)
    coeffs = coefficient_table(lams, params.p, alpha, beta)
    out_grid = grid if grid is not None else output_grid(f, g, coeffs)
    vals = _run_kernel(f, g, coeffs, params.combine, params.s, out_grid.points(), kernel)
    vals = vals.reshape(out_grid.shape)
    if refine > 1:
        edge = _boundary_cells(vals > 0)
        cells = np.argwhere(edge)
        if len(cells):
            n = out_grid.dim
            h = out_grid.step
            offs = (np.arange(refine) + 0.5) / refine - 0.5
            sub = np.stack(np.meshgrid(*([offs] * n), indexing="ij"), axis=-1).reshape(-1, n) * h
            centers = np.array(out_grid.lo) + (cells + 0.5) * h
            pts = (centers[:, None, :] + sub[None, :, :]).reshape(-1, n)
            sv = _run_kernel(f, g, coeffs, params.combine, params.s, pts, kernel)
            vals[tuple(cells.T)] = sv.reshape(len(cells), -1).mean(axis=1)
    return GridFunction(out_grid, vals)


def sup_convolution(f: GridFunction, g: GridFunction, params: ConvolutionParams,
                    kernel: str = "pruned", grid: Optional[Grid] = None, refine: int = 0) -> GridFunction:
    """h_{p,t,s}: the convex-combination case alpha = 1 - t, beta = t."""
    t = params.t
    if t == 0.0:
        return f
    if t == 1.0:
        return g
    return oplus_ps(f, g, params, 1.0 - t, t, kernel=kernel, grid=grid, refine=refine)


def _value_factor(alpha: float, p: float, s: float) -> float:
    if s == 0 or math.isinf(s):
        return 1.0
    return alpha ** (s / p)


def scale_ps(f: GridFunction, alpha: float, p: float, s: float,
             onto: Optional[Grid] = None) -> GridFunction:
    """alpha x_{p,s} f = alpha^{s/p} f(x / alpha^{1/p}).

    The grid is mapped along with the function, so no resampling is needed.
    With ``onto`` the result is resampled to that grid by nearest cell and
    its support dilated by one cell.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if p < 1:
        raise ValueError("p must be >= 1")
    combine_rule(s)
    c = alpha ** (1.0 / p)
    out = GridFunction(f.grid.scaled(c), f.values * _value_factor(alpha, p, s))
    if onto is None:
        return out
    vals = out.at(onto.points()).reshape(onto.shape)
    grown = ndimage.grey_dilation(vals, size=(3,) * onto.dim)
    vals = np.where(vals > 0, vals, grown)
    return GridFunction(onto, vals)


def check_concavity_preservation(f: GridFunction, g: GridFunction, params: ConvolutionParams,
                                 kernel: str = "pruned", max_pairs: int = 200_000,
                                 seed: int = 0) -> float:
    """Most negative midpoint violation of the matching concavity of h_{p,t,s}.

    Pairs of support cells whose index difference is even along every axis
    are used, so the midpoint is itself a cell center.
    """
    h = sup_convolution(f, g, params, kernel=kernel)
    cells = np.argwhere(h.values > 0)
    rng = np.random.default_rng(seed)
    n = len(cells)
    if n * n <= max_pairs:
        I, J = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        I, J = I.ravel(), J.ravel()
    else:
        I = rng.integers(0, n, max_pairs)
        J = rng.integers(0, n, max_pairs)
    ci, cj = cells[I], cells[J]
    keep = np.all((ci - cj) % 2 == 0, axis=1)
    ci, cj = ci[keep], cj[keep]
    cm = (ci + cj) // 2
    vi, vj, vm = (h.values[tuple(c.T)] for c in (ci, cj, cm))
    rule = params.combine
    if rule is Combine.POWER:
        e = 1.0 / params.s
        viol = vm**e - 0.5 * (vi**e + vj**e)
    elif rule is Combine.GEOMETRIC:
        with np.errstate(divide="ignore"):
            viol = np.log(vm) - 0.5 * (np.log(vi) + np.log(vj))
    elif rule is Combine.MAX:
        viol = vm - np.maximum(vi, vj)
    else:
        viol = vm - np.minimum(vi, vj)
    return float(viol.min()) if len(viol) else 0.0
