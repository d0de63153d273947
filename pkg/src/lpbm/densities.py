"""Density models and midpoint-rule integration against them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import SampledSet, SupportBody
from .grid import Grid, GridFunction

MIN_RESOLUTION = 16


class DensityKind(Enum):
    LEBESGUE = "lebesgue"
    GAUSSIAN = "gaussian"
    SCONCAVE_POWER = "sconcave_power"
    LOGCONCAVE_EXP = "logconcave_exp"
    QUASICONCAVE_PRODUCT = "quasiconcave_product"


class ConcavityClass(Enum):
    S_CONCAVE = "1/s-concave"
    LOG_CONCAVE = "log-concave"
    QUASI_CONCAVE_PRODUCT = "quasi-concave-product"


@dataclass(frozen=True, eq=False)
class Density:
    """A density phi >= 0 on R^dim with its declared concavity class.

    For the 1/s-concave class ``s`` is the exponent (s = 0 means phi is
    constant on a convex support).  ``factors`` holds the one-dimensional
    profiles of a product density.
    """

    kind: DensityKind
    dim: int
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    concavity: ConcavityClass
    s: Optional[float] = None
    name: str = ""
    factors: tuple = field(default=(), repr=False)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1, self.dim)
        return np.asarray(self.evaluator(x), dtype=float).reshape(-1)

    @property
    def is_lebesgue(self) -> bool:
        return self.kind is DensityKind.LEBESGUE

    def satisfies(self, cls: ConcavityClass, s: Optional[float] = None) -> bool:
        """Whether the declared model implies membership in ``cls``."""
        if self.kind is DensityKind.LEBESGUE:
            return True
        if cls is ConcavityClass.LOG_CONCAVE:
            return self.concavity in (ConcavityClass.LOG_CONCAVE, ConcavityClass.S_CONCAVE) or (
                self.kind is DensityKind.GAUSSIAN
            )
        if cls is ConcavityClass.S_CONCAVE:
            if self.concavity is not ConcavityClass.S_CONCAVE:
                return False
            # 1/s-concave implies 1/s'-concave for s' >= s.
            return s is None or s >= self.s
        if cls is ConcavityClass.QUASI_CONCAVE_PRODUCT:
            return bool(self.factors) or self.kind is DensityKind.GAUSSIAN
        return False


def lebesgue(dim: int) -> Density:
    return Density(DensityKind.LEBESGUE, dim, lambda x: np.ones(len(x)),
                   ConcavityClass.S_CONCAVE, s=0.0, name="lebesgue")


def gaussian_profile_1d(x: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * np.asarray(x) ** 2) / math.sqrt(2.0 * math.pi)


def triangular_profile_1d(x: np.ndarray) -> np.ndarray:
    return np.maximum(1.0 - np.abs(np.asarray(x)), 0.0)


def cauchy_profile_1d(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.asarray(x) ** 2)


def gaussian(dim: int) -> Density:
    """Standard Gaussian density (normalized)."""
    c = (2.0 * math.pi) ** (-dim / 2.0)
    return Density(DensityKind.GAUSSIAN, dim,
                   lambda x: c * np.exp(-0.5 * np.sum(x**2, axis=1)),
                   ConcavityClass.LOG_CONCAVE, name=f"gaussian{dim}",
                   factors=(gaussian_profile_1d,) * dim)


def sconcave_power(s: float, dim: int = 1, base: Optional[Callable] = None, radius: float = 1.0,
                   name: str = "") -> Density:
    """phi = psi^s with psi concave; the default psi is the cone max(1 - |x|/radius, 0)."""
    if s <= 0:
        raise ValueError("s must be positive for a power density")
    if base is None:
        base = lambda x: np.maximum(1.0 - np.linalg.norm(x, axis=1) / radius, 0.0)
        name = name or ("triangular" if dim == 1 else "cone")
    return Density(DensityKind.SCONCAVE_POWER, dim, lambda x: base(x) ** s,
                   ConcavityClass.S_CONCAVE, s=float(s), name=name or "power")


def log_concave_exp(potential, dim: int = 1, name: str = "logconcave") -> Density:
    """phi = exp(-V) with V convex, given as a callable or a 1-d table of (x, V) rows."""
    if callable(potential):
        V = potential
    else:
        tab = np.asarray(potential, dtype=float)
        if dim != 1 or tab.ndim != 2 or tab.shape[1] != 2 or len(tab) < 2:
            raise ValueError("tabulated potentials must be two-column 1-d tables")
        tab = tab[np.argsort(tab[:, 0])]
        xs, vs = tab[:, 0], tab[:, 1]
        sl, sr = (vs[1] - vs[0]) / (xs[1] - xs[0]), (vs[-1] - vs[-2]) / (xs[-1] - xs[-2])

        def V(x):
            t = x[:, 0]
            out = np.interp(t, xs, vs)
            out = np.where(t < xs[0], vs[0] + sl * (t - xs[0]), out)
            return np.where(t > xs[-1], vs[-1] + sr * (t - xs[-1]), out)

    return Density(DensityKind.LOGCONCAVE_EXP, dim, lambda x: np.exp(-np.asarray(V(x), dtype=float)),
                   ConcavityClass.LOG_CONCAVE, name=name)


def quasi_concave_product(profiles: Sequence[Callable], name: str = "product") -> Density:
    """Product of one-dimensional quasi-concave profiles, each maximal at 0."""
    profiles = tuple(profiles)
    probe = np.linspace(-10.0, 10.0, 4001)
    for prof in profiles:
        vals = np.asarray(prof(probe), dtype=float)
        if np.any(vals < 0):
            raise ValueError("profiles must be nonnegative")
        if float(prof(np.array([0.0]))[0]) < vals.max() * (1 - 1e-12):
            raise ValueError("each profile must attain its maximum at 0")

    def phi(x):
        out = np.ones(len(x))
        for i, prof in enumerate(profiles):
            out = out * prof(x[:, i])
        return out

    return Density(DensityKind.QUASICONCAVE_PRODUCT, len(profiles), phi,
                   ConcavityClass.QUASI_CONCAVE_PRODUCT, name=name, factors=profiles)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Quadrature:
    """Midpoint rule on a box with ``resolution`` cells per axis."""

    lo: tuple
    hi: tuple
    resolution: int
    rule: str = "midpoint"

    def __post_init__(self):
        if self.resolution < MIN_RESOLUTION:
            raise ValueError(f"resolution must be >= {MIN_RESOLUTION}")
        if self.rule != "midpoint":
            raise ValueError("only the midpoint rule is supported")
        object.__setattr__(self, "lo", tuple(np.atleast_1d(np.asarray(self.lo, dtype=float))))
        object.__setattr__(self, "hi", tuple(np.atleast_1d(np.asarray(self.hi, dtype=float))))

    @property
    def grid(self) -> Grid:
        return Grid.box(self.lo, self.hi, self.resolution)

    @classmethod
    def default_for(cls, mu: Density, resolution: int = 128) -> "Quadrature":
        w = 8.0 if mu.kind is DensityKind.GAUSSIAN else 4.0
        return cls((-w,) * mu.dim, (w,) * mu.dim, resolution)


def _check_inside(inner: Grid, q: Optional[Quadrature], what: str):
    if q is not None and not q.grid.contains_box(inner):
        raise ValueError(f"{what} exceeds the quadrature box")


def measure_of_set(mu: Density, A: SampledSet, q: Optional[Quadrature] = None) -> float:
    """Midpoint-rule mu(A) over the cells of A's mask form."""
    if A.dim != mu.dim:
        raise ValueError("dimension mismatch")
    if A.mask is None:
        if q is None:
            raise ValueError("a point-list set needs a quadrature grid")
        A = A.rasterize(q.grid)
    _check_inside(A.grid, q, "set")
    pts = A.grid.centers()[A.mask]
    if len(pts) == 0:
        return 0.0
    return float(np.sum(mu(pts)) * A.grid.cell_volume)


def integrate(mu: Density, f: GridFunction, q: Optional[Quadrature] = None) -> float:
    """Midpoint-rule integral of f against mu."""
    if f.dim != mu.dim:
        raise ValueError("dimension mismatch")
    _check_inside(f.grid, q, "function domain")
    m = f.mask
    if not m.any():
        return 0.0
    pts = f.grid.centers()[m]
    return float(np.sum(f.values[m] * mu(pts)) * f.grid.cell_volume)


def integrate_power(mu: Density, f: GridFunction, c: float) -> float:
    """Integral of f^c against mu over the support of f."""
    return integrate(mu, f.power(c))


@dataclass(frozen=True)
class ConcavityReport:
    concavity: ConcavityClass
    s: Optional[float]
    violation: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.violation >= -self.tolerance


def _midpoint_pairs(grid: Grid, samples: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    lo, hi = np.array(grid.lo), np.array(grid.hi)
    X = rng.uniform(lo, hi, size=(samples, grid.dim))
    Y = rng.uniform(lo, hi, size=(samples, grid.dim))
    pts = grid.points()
    if len(pts) > 256:
        pts = pts[rng.choice(len(pts), 256, replace=False)]
    I, J = np.triu_indices(len(pts), 1)
    return np.vstack([X, pts[I]]), np.vstack([Y, pts[J]])


def classify_concavity(mu: Density, q: Quadrature, cls: Optional[ConcavityClass] = None,
                       s: Optional[float] = None, samples: int = 20000, seed: int = 0,
                       tolerance: float = 1e-12) -> ConcavityReport:
    """Midpoint test of the declared (or requested) concavity class.

    Returns the most negative violation found; nonnegative means no
    counterexample among the sampled pairs.
    """
    cls = cls or mu.concavity
    if s is None:
        s = mu.s
    X, Y = _midpoint_pairs(q.grid, samples, seed)
    M = 0.5 * (X + Y)
    if cls is ConcavityClass.QUASI_CONCAVE_PRODUCT:
        if not mu.factors:
            return ConcavityReport(cls, s, -math.inf, tolerance)
        worst = math.inf
        for i, prof in enumerate(mu.factors):
            fx, fy, fm = prof(X[:, i]), prof(Y[:, i]), prof(M[:, i])
            worst = min(worst, float(np.min(fm - np.minimum(fx, fy))))
            grid1 = np.linspace(q.lo[i], q.hi[i], 2001)
            worst = min(worst, float(prof(np.array([0.0]))[0] - np.max(prof(grid1))))
        return ConcavityReport(cls, s, worst, tolerance)
    fx, fy, fm = mu(X), mu(Y), mu(M)
    both = (fx > 0) & (fy > 0)
    if not both.any():
        return ConcavityReport(cls, s, 0.0, tolerance)
    fx, fy, fm = fx[both], fy[both], fm[both]
    if cls is ConcavityClass.LOG_CONCAVE:
        with np.errstate(divide="ignore"):
            v = np.log(fm) - 0.5 * (np.log(fx) + np.log(fy))
    elif s is None or s == 0:
        v = fm - np.maximum(fx, fy)
    elif math.isinf(s):
        with np.errstate(divide="ignore"):
            v = np.log(fm) - 0.5 * (np.log(fx) + np.log(fy))
    else:
        v = fm ** (1.0 / s) - 0.5 * (fx ** (1.0 / s) + fy ** (1.0 / s))
    return ConcavityReport(cls, s, float(np.min(v)), tolerance)


# ---------------------------------------------------------------------------
# Convex bodies
# ---------------------------------------------------------------------------

_GL_CACHE: dict = {}


def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = (0.5 * (x + 1.0), 0.5 * w)
    return _GL_CACHE[n]


def body_measure(mu: Density, K: SupportBody, order: int = 24, panels: int = 64) -> float:
    """mu of the polytope circumscribed by K's support lines.

    Lebesgue uses the exact polygon area; other densities use Gauss-Legendre
    on a triangle fan from an interior point, which is smooth in the vertices.
    """
    if K.dim != mu.dim:
        raise ValueError("dimension mismatch")
    if mu.is_lebesgue:
        return K.area()
    V = K.vertices()
    if K.dim == 1:
        lo, hi = V[0, 0], V[1, 0]
        x, w = _gauss_legendre(order)
        edges = np.linspace(lo, hi, panels + 1)
        h = np.diff(edges)
        pts = (edges[:-1, None] + h[:, None] * x[None, :]).reshape(-1, 1)
        ww = (h[:, None] * w[None, :]).reshape(-1)
        return float(np.sum(ww * mu(pts)))
    c = K.interior_point()
    x, w = _gauss_legendre(order)
    R, U = np.meshgrid(x, x, indexing="ij")
    WR = np.outer(w, w)
    total = 0.0
    P = V - c
    Q = np.roll(P, -1, axis=0)
    det = np.abs(P[:, 0] * Q[:, 1] - P[:, 1] * Q[:, 0])
    # point = c + r (P + u (Q - P)); Jacobian r |det(P, Q)|
    base = P[:, None, None, :] + U[None, :, :, None] * (Q - P)[:, None, None, :]
    pts = c + R[None, :, :, None] * base
    vals = mu(pts.reshape(-1, 2)).reshape(len(P), order, order)
    total = np.sum(det[:, None, None] * (WR * R)[None] * vals)
    return float(total)
