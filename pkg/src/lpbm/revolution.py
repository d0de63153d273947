"""Bodies of revolution over a profile, ball bodies and level sets."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .densities import Quadrature, integrate, lebesgue
from .geometry import (
    RadialBody,
    SampledSet,
    lambda_values,
    lyz_combine,
    sphere_directions,
    unit_ball_volume,
)
from .grid import Grid, GridFunction
from .supconv import ConvolutionParams, Combine, evaluate_oplus

RADIAL_POINTS = 4096
MAX_DIRECT_DIM = 4


@dataclass(frozen=True, eq=False)
class RevolutionBody:
    """{(x, y) : x in supp w, |y| <= w(x)^{1/s}} in R^{n+s}."""

    profile: GridFunction
    fiber_dim: int

    def __post_init__(self):
        if int(self.fiber_dim) != self.fiber_dim or self.fiber_dim < 1:
            raise ValueError("fiber dimension must be a positive integer")

    @property
    def base_dim(self) -> int:
        return self.profile.dim


@dataclass(frozen=True, eq=False)
class MultipleFunction:
    """w(x_1) ... w(x_m) on R^{nm}."""

    base: GridFunction
    copies: int

    def __post_init__(self):
        if self.copies < 1:
            raise ValueError("copies must be >= 1")

    def at(self, pts: np.ndarray) -> np.ndarray:
        n = self.base.dim
        pts = np.asarray(pts, dtype=float).reshape(-1, n * self.copies)
        out = np.ones(len(pts))
        for i in range(self.copies):
            out *= self.base.at(pts[:, i * n : (i + 1) * n])
        return out


def _profile_integral(w: GridFunction, q: Optional[Quadrature]) -> float:
    return integrate(lebesgue(w.dim), w, q)


def revolution_volume(body: RevolutionBody, q: Optional[Quadrature] = None) -> float:
    """|B_2^s| times the integral of the profile."""
    return unit_ball_volume(body.fiber_dim) * _profile_integral(body.profile, q)


def multiple_volume(mf: MultipleFunction, ell: int, q: Optional[Quadrature] = None) -> float:
    """|B_2^ell| times (integral of w)^m."""
    if ell < 1:
        raise ValueError("ell must be a positive integer")
    return unit_ball_volume(ell) * _profile_integral(mf.base, q) ** mf.copies


def _direct_region_volume(base_fn, base_lo, base_hi, fiber_dim, radius_max, resolution):
    dim = len(base_lo) + fiber_dim
    if dim > MAX_DIRECT_DIM:
        raise ValueError(f"direct integration limited to dimension {MAX_DIRECT_DIM}")
    if radius_max <= 0:
        return 0.0
    lo = list(base_lo) + [-radius_max] * fiber_dim
    hi = list(base_hi) + [radius_max] * fiber_dim
    grid = Grid.box(lo, hi, resolution)
    pts = grid.points()
    nb = len(base_lo)
    wv = base_fn(pts[:, :nb])
    r = np.linalg.norm(pts[:, nb:], axis=1)
    inside = (wv > 0) & (r <= np.where(wv > 0, wv, 0.0) ** (1.0 / fiber_dim))
    return float(inside.sum() * grid.cell_volume)


def direct_revolution_volume(body: RevolutionBody, resolution: int = 96) -> float:
    """Cell count of the region on a fresh (n+s)-dimensional grid."""
    w = body.profile
    if w.is_empty():
        return 0.0
    lo, hi = w.support_box()
    return _direct_region_volume(w.at, lo, hi, body.fiber_dim, w.sup ** (1.0 / body.fiber_dim),
                                 resolution)


def direct_multiple_volume(mf: MultipleFunction, ell: int, resolution: int = 48) -> float:
    w = mf.base
    if w.is_empty():
        return 0.0
    lo, hi = w.support_box()
    m = mf.copies
    return _direct_region_volume(mf.at, np.tile(lo, m), np.tile(hi, m), ell,
                                 (w.sup**m) ** (1.0 / ell), resolution)


# ---------------------------------------------------------------------------
# inclusion checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InclusionReport:
    points_checked: int
    violations: int
    worst_excess: float

    @property
    def ok(self) -> bool:
        return self.violations == 0


def _fiber_offsets(dim: int, rings: int) -> np.ndarray:
    """Unit-ball sample: the origin plus rings of directions."""
    radii = np.linspace(0.0, 1.0, rings + 1)[1:]
    if dim == 1:
        U = np.array([[1.0], [-1.0]])
    else:
        U, _ = sphere_directions(dim, 8 if dim == 2 else 12)
    pts = [np.zeros((1, dim))] + [r * U for r in radii]
    return np.vstack(pts)


def _sample_body(base_pts: np.ndarray, radii: np.ndarray, fiber_dim: int, rings: int) -> SampledSet:
    keep = radii > 0
    base_pts, radii = base_pts[keep], radii[keep]
    offs = _fiber_offsets(fiber_dim, rings)
    pts = np.concatenate(
        [np.repeat(base_pts, len(offs), axis=0),
         (radii[:, None, None] * offs[None, :, :]).reshape(-1, fiber_dim)],
        axis=1,
    )
    return SampledSet(pts)


def _base_samples(w: GridFunction, copies: int, stride: int) -> np.ndarray:
    cells = np.argwhere(w.values > 0)[::stride]
    centers = np.array(w.grid.lo) + (cells + 0.5) * w.grid.step
    if copies == 1:
        return centers
    idx = np.array(list(itertools.product(range(len(centers)), repeat=copies)))
    return np.concatenate([centers[idx[:, k]] for k in range(copies)], axis=1)


def _coarse_lambda_count(n: int, target: int = 17) -> int:
    for k in range(min(n, target), 1, -1):
        if (n - 1) % (k - 1) == 0:
            return k
    return 2


def check_inclusion_lemma(f: GridFunction, g: GridFunction, params: ConvolutionParams,
                          form: str = "A", ell: Optional[int] = None, copies: Optional[int] = None,
                          stride: int = 1, rings: int = 2) -> InclusionReport:
    """Sampled check that the L_p combination of revolution bodies lies in the
    revolution body of h_{p,t,s}.

    ``form="A"`` uses A_s with integer s; ``form="B"`` uses B_s with
    s = ell / copies.  Each combined point (x, y) must satisfy
    |y| <= h(x)^{1/s}, where h is taken as the largest value within half a
    cell of x.
    """
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    n = f.dim
    s = params.s
    if form == "A":
        if int(s) != s or s < 1:
            raise ValueError("the A form needs a positive integer s")
        m, fib = 1, int(s)
    elif form == "B":
        if ell is None or copies is None:
            raise ValueError("the B form needs ell and copies")
        if abs(s - ell / copies) > 1e-12:
            raise ValueError("s must equal ell / copies")
        m, fib = int(copies), int(ell)
    else:
        raise ValueError(f"unknown form {form!r}")
    if n * m + fib > MAX_DIRECT_DIM:
        raise ValueError("dimension budget exceeded")
    if params.combine is not Combine.POWER:
        raise ValueError("inclusion checks need a finite positive s")
    t = params.t
    bf = _base_samples(f, m, stride)
    bg = _base_samples(g, m, stride)

    def radii(w, pts):
        vals = np.ones(len(pts))
        for i in range(m):
            vals *= w.at(pts[:, i * n : (i + 1) * n])
        return vals ** (1.0 / fib)

    Af = _sample_body(bf, radii(f, bf), fib, rings)
    Ag = _sample_body(bg, radii(g, bg), fib, rings)
    if t in (0.0, 1.0):
        return InclusionReport(len(Af.points if t == 0 else Ag.points), 0, 0.0)
    L = _coarse_lambda_count(params.lambda_grid)
    comb = lyz_combine(Af, Ag, params.p, 1.0 - t, t, lambda_grid=L).points
    base = comb[:, : n * m]
    fiber = np.linalg.norm(comb[:, n * m :], axis=1)
    flat = base.reshape(-1, n)
    uniq, inv = np.unique(np.round(flat, 12), axis=0, return_inverse=True)
    half = 0.5 * max(f.grid.max_step, g.grid.max_step)
    probes = [uniq]
    for d in range(n):
        for sign in (-1.0, 1.0):
            shifted = uniq.copy()
            shifted[:, d] += sign * half
            probes.append(shifted)
    vals = evaluate_oplus(f, g, params, 1.0 - t, t, np.vstack(probes))
    hmax = vals.reshape(len(probes), len(uniq)).max(axis=0)
    hv = hmax[inv.reshape(-1)].reshape(len(comb), m)
    bound = np.prod(hv, axis=1) ** (1.0 / fib)
    excess = fiber - bound * (1.0 + 1e-9) - 1e-12
    return InclusionReport(len(comb), int(np.sum(excess > 0)), float(max(0.0, excess.max())))


# ---------------------------------------------------------------------------
# ball bodies and level sets
# ---------------------------------------------------------------------------


def _origin_value(f: GridFunction) -> float:
    return float(f.at(np.zeros((1, f.dim)))[0])


def _ray_exit(grid: Grid, U: np.ndarray) -> np.ndarray:
    lo, hi = np.array(grid.lo), np.array(grid.hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(U > 0, hi / U, np.where(U < 0, lo / U, np.inf))
    return np.min(t, axis=1)


def ball_body(f: GridFunction, qexp: float, directions: int = 360,
              points: int = RADIAL_POINTS) -> RadialBody:
    """Radial function [(q/|f|_inf) int_0^inf f(r u) r^{q-1} dr]^{1/q}."""
    if qexp <= 0:
        raise ValueError("q must be positive")
    M = f.sup
    if M <= 0:
        raise ValueError("zero integral")
    if _origin_value(f) < M * (1 - 1e-12):
        raise ValueError("f must attain its maximum at the origin")
    U, W = sphere_directions(f.dim, directions)
    R = _ray_exit(f.grid, U)
    k = (np.arange(points) + 0.5) / points
    # First pass locates where the profile falls below 1e-12 of its peak.
    r = R[:, None] * k[None, :]
    vals = f.at((r[:, :, None] * U[:, None, :]).reshape(-1, f.dim)).reshape(len(U), points)
    alive = vals >= 1e-12 * M
    last = np.where(alive.any(axis=1), points - 1 - np.argmax(alive[:, ::-1], axis=1), 0)
    R = np.minimum(R, R * (last + 1) / points)
    r = R[:, None] * k[None, :]
    vals = f.at((r[:, :, None] * U[:, None, :]).reshape(-1, f.dim)).reshape(len(U), points)
    integral = np.sum(vals * r ** (qexp - 1.0), axis=1) * (R / points)
    rho = (qexp / M * integral) ** (1.0 / qexp)
    return RadialBody(f.dim, U, rho, W)


@dataclass(frozen=True, eq=False)
class LevelBodyResult:
    level_set: SampledSet
    ball: RadialBody
    km_ratio: float
    inner_ok: bool


def level_body(f: GridFunction, directions: int = 360) -> LevelBodyResult:
    """Super-level set {f >= e^{-n} |f|_inf} and the smallest c with L in c K_n(f)."""
    if f.is_empty():
        raise ValueError("threshold level empty")
    n = f.dim
    thr = math.exp(-n) * f.sup
    mask = f.values >= thr
    L = SampledSet.from_mask(f.grid, mask)
    K = ball_body(f, float(n), directions)
    cells = np.argwhere(mask)
    h = f.grid.step
    corners = np.array(list(itertools.product((0, 1), repeat=n)))
    pts = (np.array(f.grid.lo) + (cells[:, None, :] + corners[None, :, :]) * h).reshape(-1, n)
    norms = np.linalg.norm(pts, axis=1)
    pts, norms = pts[norms > 1e-12], norms[norms > 1e-12]
    rho = K.radial_at(pts / norms[:, None])
    with np.errstate(divide="ignore"):
        ratios = np.where(rho > 0, norms / rho, np.inf)
    km = float(ratios.max()) if len(ratios) else 1.0
    # K inside L up to one cell: pull each boundary point of K inward by a cell diagonal.
    diag = float(np.linalg.norm(h))
    inner = np.maximum(K.rho - diag, 0.0)[:, None] * K.directions
    inner_ok = bool(np.all(f.at(inner) >= thr))
    return LevelBodyResult(L, K, km, inner_ok)


def volume_identity_gap(f: GridFunction, directions: int = 360) -> float:
    """Relative gap between |K_n(f)| and the integral of f over |f|_inf."""
    K = ball_body(f, float(f.dim), directions)
    target = _profile_integral(f, None) / f.sup
    return abs(K.volume() - target) / target
