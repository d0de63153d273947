"""Sampled sets, convex bodies by support values, and their L_p combinations."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, cKDTree

from .grid import Grid
from .means import combination_weights

DEFAULT_LAMBDA_GRID = 129
DEFAULT_DIRECTIONS = 360


def lambda_values(n: int) -> np.ndarray:
    """Uniform lambda grid on [0, 1] with ``n`` points, endpoints included."""
    if n < 2:
        raise ValueError("lambda grid needs at least two points")
    return np.linspace(0.0, 1.0, int(n))


def weight_table(p: float, alpha: float, beta: float, lambdas: np.ndarray) -> np.ndarray:
    """Rows (lambda, a, b) of combination coefficients."""
    rows = [(lam, *combination_weights(p, alpha, beta, float(lam))) for lam in lambdas]
    return np.array(rows, dtype=float).reshape(-1, 3)


# ---------------------------------------------------------------------------
# Sampled sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SampledSet:
    """A finite sampling of a set, optionally with a cell-mask form.

    In the mask form a cell belongs to the set when its center does; the
    point list is then the list of those centers.
    """

    points: np.ndarray = field(repr=False)
    grid: Optional[Grid] = None
    mask: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.shape[0] == 0 and self.mask is None:
            raise ValueError("sampled set must be nonempty")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        object.__setattr__(self, "points", pts)
        if (self.grid is None) != (self.mask is None):
            raise ValueError("grid and mask must be given together")
        if self.mask is not None:
            m = np.asarray(self.mask, dtype=bool)
            if m.shape != self.grid.shape:
                raise ValueError("mask shape does not match grid")
            object.__setattr__(self, "mask", m)

    @classmethod
    def from_mask(cls, grid: Grid, mask: np.ndarray, allow_empty: bool = False) -> "SampledSet":
        """Grid-form set; an empty mask is accepted only when ``allow_empty``."""
        mask = np.asarray(mask, dtype=bool)
        if not mask.any() and not allow_empty:
            raise ValueError("sampled set must be nonempty")
        return cls(grid.centers()[mask].reshape(-1, grid.dim), grid, mask)

    @classmethod
    def from_predicate(cls, grid: Grid, pred: Callable[[np.ndarray], np.ndarray]) -> "SampledSet":
        pts = grid.points()
        return cls.from_mask(grid, np.asarray(pred(pts), dtype=bool).reshape(grid.shape))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def has_grid(self) -> bool:
        return self.grid is not None

    def rasterize(self, grid: Grid, tol: float = 1e-9) -> "SampledSet":
        """Mask form on ``grid``: every cell containing a sample point."""
        if grid.dim != self.dim:
            raise ValueError("dimension mismatch")
        mask = rasterize_points(self.points, grid, tol)
        return SampledSet(self.points, grid, mask)

    def volume(self) -> float:
        if self.mask is None:
            raise ValueError("volume needs the mask form")
        return float(self.mask.sum()) * self.grid.cell_volume


def _require_nonempty(*sets: SampledSet) -> None:
    if any(len(S.points) == 0 for S in sets):
        raise ValueError("sampled set must be nonempty")


def rasterize_points(points: np.ndarray, grid: Grid, tol: float = 1e-9, mask=None) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, grid.dim)
    lo = np.array(grid.lo)
    hi = np.array(grid.hi)
    slack = tol * np.maximum(1.0, np.abs(hi - lo))
    if np.any(pts < lo - slack) or np.any(pts > hi + slack):
        raise ValueError("set exceeds the grid box")
    idx, _ = grid.cell_index(pts)
    if mask is None:
        mask = np.zeros(grid.shape, dtype=bool)
    mask[tuple(idx.T)] = True
    return mask


def interval_set(grid: Grid, lo: float, hi: float) -> SampledSet:
    return box_set(grid, [lo], [hi])


def box_set(grid: Grid, lo, hi) -> SampledSet:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return SampledSet.from_predicate(grid, lambda x: np.all((x >= lo) & (x <= hi), axis=1))


def ball_set(grid: Grid, radius: float, center=None) -> SampledSet:
    c = np.zeros(grid.dim) if center is None else np.asarray(center, dtype=float)
    return SampledSet.from_predicate(grid, lambda x: np.sum((x - c) ** 2, axis=1) <= radius**2)


def halfspace_set(grid: Grid, normals, offsets) -> SampledSet:
    """Cells whose center satisfies every inequality <n_i, x> <= b_i."""
    N = np.asarray(normals, dtype=float).reshape(-1, grid.dim)
    b = np.asarray(offsets, dtype=float)
    return SampledSet.from_predicate(grid, lambda x: np.all(x @ N.T <= b + 1e-12, axis=1))


def polygon_set(grid: Grid, vertices) -> SampledSet:
    """Convex hull of the given vertices, sampled on ``grid``."""
    hull = ConvexHull(np.asarray(vertices, dtype=float))
    eq = hull.equations
    return halfspace_set(grid, eq[:, :-1], -eq[:, -1])


def lyz_combine(
    A: SampledSet,
    B: SampledSet,
    p: float,
    alpha: float,
    beta: float,
    lambda_grid: int = DEFAULT_LAMBDA_GRID,
    grid: Optional[Grid] = None,
) -> SampledSet:
    """Sampled L_p combination {a(lam) x + b(lam) y : x in A, y in B, lam in grid}.

    With ``grid`` given the result is accumulated directly into a cell mask,
    which keeps memory bounded for large samplings.
    """
    if A.dim != B.dim:
        raise ValueError("dimension mismatch")
    _require_nonempty(A, B)
    if alpha <= 0 or beta <= 0:
        raise ValueError("scalars must be positive")
    table = weight_table(p, alpha, beta, lambda_values(lambda_grid))
    pairs = np.unique(table[:, 1:], axis=0)
    X, Y = A.points, B.points
    chunk = max(1, 2_000_000 // max(1, len(Y)))
    if grid is not None:
        mask = np.zeros(grid.shape, dtype=bool)
        for a, b in pairs:
            for s in range(0, len(X), chunk):
                pts = a * X[s : s + chunk, None, :] + b * Y[None, :, :]
                rasterize_points(pts.reshape(-1, A.dim), grid, mask=mask)
        return SampledSet.from_mask(grid, mask)
    out = []
    for a, b in pairs:
        for s in range(0, len(X), chunk):
            out.append((a * X[s : s + chunk, None, :] + b * Y[None, :, :]).reshape(-1, A.dim))
    pts = np.concatenate(out)
    pts = np.unique(np.round(pts, 12), axis=0)
    return SampledSet(pts)


def minkowski_combine(A: SampledSet, B: SampledSet, a: float, b: float) -> SampledSet:
    """Classical sampled combination a A + b B."""
    _require_nonempty(A, B)
    pts = (a * A.points[:, None, :] + b * B.points[None, :, :]).reshape(-1, A.dim)
    return SampledSet(np.unique(np.round(pts, 12), axis=0))


def is_weakly_unconditional(A: SampledSet, tol: float = 0.0) -> bool:
    """Closure of A under zeroing any subset of coordinates."""
    n = A.dim
    subsets = [S for k in range(1, n + 1) for S in itertools.combinations(range(n), k)]
    if A.mask is not None:
        g = A.grid
        zero_cells = []
        for ax in range(n):
            edges = g.lo[ax] + np.arange(g.shape[ax] + 1) * g.step[ax]
            hit = np.nonzero((edges[:-1] <= tol) & (edges[1:] >= -tol))[0]
            zero_cells.append(hit)
        for S in subsets:
            if any(len(zero_cells[ax]) == 0 for ax in S):
                return False
            reduced = A.mask
            for ax in S:
                reduced = np.any(np.take(reduced, zero_cells[ax], axis=ax), axis=ax, keepdims=True)
            if np.any(A.mask & ~np.broadcast_to(reduced, A.mask.shape)):
                return False
        return True
    tree = cKDTree(A.points)
    for S in subsets:
        z = A.points.copy()
        z[:, list(S)] = 0.0
        d, _ = tree.query(z)
        if np.any(d > tol + 1e-12):
            return False
    return True


def cartesian_power(A: SampledSet, m: int) -> SampledSet:
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return A
    if A.mask is not None and A.dim * m <= 4:
        g = A.grid
        grid = Grid(g.lo * m, g.hi * m, g.shape * m)
        mask = A.mask
        for _ in range(m - 1):
            mask = np.multiply.outer(mask, A.mask).astype(bool)
        return SampledSet.from_mask(grid, mask, allow_empty=True)
    idx = np.array(list(itertools.product(range(len(A.points)), repeat=m)))
    pts = np.concatenate([A.points[idx[:, k]] for k in range(m)], axis=1)
    return SampledSet(pts)


def hausdorff_distance(A: SampledSet, B: SampledSet) -> float:
    if A.dim != B.dim:
        raise ValueError("dimension mismatch")
    _require_nonempty(A, B)
    d_ab, _ = cKDTree(B.points).query(A.points)
    d_ba, _ = cKDTree(A.points).query(B.points)
    return float(max(d_ab.max(), d_ba.max()))


def are_dilates(A: SampledSet, B: SampledSet, tol_cells: float = 2.0) -> bool:
    """Whether A and B agree after normalizing to unit volume."""
    va, vb = A.volume(), B.volume()
    if va == 0 or vb == 0:
        return va == vb
    n = A.dim
    ra, rb = va ** (1.0 / n), vb ** (1.0 / n)
    tol = tol_cells * max(A.grid.max_step / ra, B.grid.max_step / rb)
    return hausdorff_distance(SampledSet(A.points / ra), SampledSet(B.points / rb)) <= tol


# ---------------------------------------------------------------------------
# Convex bodies given by support values
# ---------------------------------------------------------------------------


def unit_directions(dim: int, count: int = DEFAULT_DIRECTIONS) -> np.ndarray:
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        th = 2.0 * np.pi * np.arange(count) / count
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    raise ValueError("support bodies are limited to dimensions 1 and 2")


@dataclass(frozen=True, eq=False)
class SupportBody:
    """Convex body sampled by its support function over fixed directions."""

    dim: int
    directions: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)

    def __post_init__(self):
        U = np.asarray(self.directions, dtype=float).reshape(-1, self.dim)
        h = np.asarray(self.h, dtype=float).reshape(-1)
        if self.dim not in (1, 2):
            raise ValueError("support bodies are limited to dimensions 1 and 2")
        if len(U) != len(h):
            raise ValueError("one support value per direction is required")
        if not np.all(np.isfinite(h)):
            raise ValueError("support values must be finite")
        object.__setattr__(self, "directions", U)
        object.__setattr__(self, "h", h)

    @classmethod
    def from_points(cls, points, dim: Optional[int] = None, count: int = DEFAULT_DIRECTIONS) -> "SupportBody":
        P = np.asarray(points, dtype=float)
        if P.ndim == 1:
            P = P.reshape(-1, 1 if dim in (None, 1) else dim)
        U = unit_directions(P.shape[1], count)
        return cls(P.shape[1], U, (P @ U.T).max(axis=0))

    @classmethod
    def interval(cls, lo: float, hi: float) -> "SupportBody":
        return cls(1, unit_directions(1), np.array([hi, -lo], dtype=float))

    @classmethod
    def ball(cls, radius: float, dim: int = 2, count: int = DEFAULT_DIRECTIONS) -> "SupportBody":
        U = unit_directions(dim, count)
        return cls(dim, U, np.full(len(U), float(radius)))

    @classmethod
    def box(cls, lo, hi, count: int = DEFAULT_DIRECTIONS) -> "SupportBody":
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        corners = np.array(list(itertools.product(*zip(lo, hi))))
        return cls.from_points(corners, dim=len(lo), count=count)

    @property
    def origin_interior(self) -> bool:
        return bool(np.all(self.h > 0))

    def same_directions(self, other: "SupportBody") -> bool:
        return (
            self.dim == other.dim
            and self.directions.shape == other.directions.shape
            and np.allclose(self.directions, other.directions, atol=1e-12)
        )

    def dilate(self, c: float) -> "SupportBody":
        if c < 0:
            raise ValueError("dilation factor must be nonnegative")
        return SupportBody(self.dim, self.directions, c * self.h)

    def lp_scale(self, c: float, p: float) -> "SupportBody":
        """The body c ._p K, i.e. the dilation by c^{1/p}."""
        return self.dilate(c ** (1.0 / p))

    def interior_point(self) -> np.ndarray:
        if self.origin_interior:
            return np.zeros(self.dim)
        U, h = self.directions, self.h
        # Chebyshev center: maximize r subject to <u_i, x> + r <= h_i.
        c = np.zeros(self.dim + 1)
        c[-1] = -1.0
        res = linprog(c, A_ub=np.hstack([U, np.ones((len(U), 1))]), b_ub=h,
                      bounds=[(None, None)] * self.dim + [(0, None)])
        if not res.success or res.x[-1] <= 1e-12:
            raise ValueError("support values describe an empty or degenerate body")
        return res.x[:-1]

    def vertices(self) -> np.ndarray:
        """Vertices of the circumscribed polytope (ordered counterclockwise in 2D)."""
        if self.dim == 1:
            lo, hi = -self.h[1], self.h[0]
            if hi < lo:
                raise ValueError("empty interval")
            return np.array([[lo], [hi]])
        x0 = self.interior_point()
        halfspaces = np.hstack([self.directions, -self.h[:, None]])
        V = HalfspaceIntersection(halfspaces, x0).intersections
        hull = ConvexHull(V)
        return V[hull.vertices]

    def is_discretely_convex(self, tol: float = 1e-9) -> bool:
        """Every support value is at most the one induced by its two neighbors."""
        if self.dim == 1:
            return bool(self.h[0] + self.h[1] >= -tol)
        U, h = self.directions, self.h
        D = len(h)
        for i in range(D):
            j, k = (i - 1) % D, (i + 1) % D
            M = np.array([U[j], U[k]])
            if abs(np.linalg.det(M)) < 1e-14:
                continue
            v = np.linalg.solve(M, [h[j], h[k]])
            if h[i] > U[i] @ v + tol * max(1.0, abs(h[i])):
                return False
        return True

    def repaired(self) -> "SupportBody":
        """Largest convex-consistent support values not exceeding ``h``."""
        if self.dim == 1:
            return self
        V = self.vertices()
        return SupportBody(self.dim, self.directions, (V @ self.directions.T).max(axis=0))

    def contains(self, pts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        return np.all(pts @ self.directions.T <= self.h + tol, axis=1)

    def to_sampled_set(self, grid: Grid) -> SampledSet:
        return SampledSet.from_predicate(grid, self.contains)

    def area(self) -> float:
        """Lebesgue measure of the circumscribed polytope."""
        V = self.vertices()
        if self.dim == 1:
            return float(V[1, 0] - V[0, 0])
        x, y = V[:, 0], V[:, 1]
        return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def firey_combine(K: SupportBody, L: SupportBody, p: float, alpha: float, beta: float) -> SupportBody:
    """Support values (alpha h_K^p + beta h_L^p)^{1/p}."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if alpha <= 0 or beta <= 0:
        raise ValueError("scalars must be positive")
    if not K.same_directions(L):
        raise ValueError("bodies must share a direction set")
    if not (K.origin_interior and L.origin_interior):
        raise ValueError("support values must be positive (origin in the interior)")
    return SupportBody(K.dim, K.directions, (alpha * K.h**p + beta * L.h**p) ** (1.0 / p))


# ---------------------------------------------------------------------------
# Star bodies given by radial values
# ---------------------------------------------------------------------------


def sphere_directions(dim: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Directions and matching solid-angle weights."""
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.ones(2)
    if dim == 2:
        U = unit_directions(2, count)
        return U, np.full(count, 2.0 * np.pi / count)
    if dim == 3:
        k = np.arange(count) + 0.5
        z = 1.0 - 2.0 * k / count
        phi = np.pi * (1.0 + 5**0.5) * k
        r = np.sqrt(1.0 - z**2)
        U = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
        return U, np.full(count, 4.0 * np.pi / count)
    raise ValueError("radial bodies are limited to dimensions 1 to 3")


@dataclass(frozen=True, eq=False)
class RadialBody:
    """Star body about the origin given by radial values on a direction set."""

    dim: int
    directions: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        if np.any(rho < 0) or not np.all(np.isfinite(rho)):
            raise ValueError("radial values must be finite and nonnegative")

    def volume(self) -> float:
        """Polar-coordinate volume (1/n) sum w_i rho_i^n."""
        return float(np.sum(self.weights * self.rho**self.dim) / self.dim)

    def radial_at(self, u: np.ndarray) -> np.ndarray:
        """Radial function at arbitrary unit vectors."""
        u = np.asarray(u, dtype=float).reshape(-1, self.dim)
        if self.dim == 1:
            return np.where(u[:, 0] >= 0, self.rho[0], self.rho[1])
        if self.dim == 2:
            # Boundary of the star polygon through rho_i u_i.
            D = len(self.rho)
            th = np.mod(np.arctan2(u[:, 1], u[:, 0]), 2 * np.pi)
            step = 2 * np.pi / D
            i = np.floor(th / step).astype(int) % D
            j = (i + 1) % D
            P = self.rho[i, None] * self.directions[i]
            Q = self.rho[j, None] * self.directions[j]
            d = Q - P
            cross = lambda a, b: a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
            denom = cross(u, d)
            with np.errstate(divide="ignore", invalid="ignore"):
                r = cross(P, d) / denom
            fallback = np.minimum(self.rho[i], self.rho[j])
            return np.where(np.isfinite(r) & (r >= 0), r, fallback)
        # dim 3: nearest sampled direction
        k = np.argmax(u @ self.directions.T, axis=1)
        return self.rho[k]


def unit_ball_volume(k: int) -> float:
    return math.pi ** (k / 2.0) / math.gamma(k / 2.0 + 1.0)
