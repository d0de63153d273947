"""Named primitives and the built-in fixture suite."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .densities import (
    Density,
    cauchy_profile_1d,
    gaussian,
    gaussian_profile_1d,
    lebesgue,
    log_concave_exp,
    quasi_concave_product,
    sconcave_power,
    triangular_profile_1d,
)
from .geometry import SampledSet, SupportBody, ball_set, box_set, polygon_set
from .grid import Grid, GridFunction
from .harness import Fixture, TheoremId

DEFAULT_RESOLUTION = 64
DEFAULT_RESOLUTION_2D = 24


# ---------------------------------------------------------------------------
# named primitives
# ---------------------------------------------------------------------------


def _floats(v, dim: Optional[int] = None) -> np.ndarray:
    if isinstance(v, str):
        v = [float(x) for x in v.replace(",", " ").split()]
    a = np.atleast_1d(np.asarray(v, dtype=float))
    if dim is not None and a.size == 1 and dim > 1:
        a = np.full(dim, a[0])
    return a


def make_density(kind: str, dim: int, **kw) -> Density:
    kind = kind.lower()
    if kind == "lebesgue":
        return lebesgue(dim)
    if kind == "gaussian":
        return gaussian(dim)
    if kind in ("triangular", "cone", "sconcave"):
        return sconcave_power(float(kw.get("s", 1.0)), dim, radius=float(kw.get("radius", 1.0)))
    if kind == "triangular_product":
        return quasi_concave_product([triangular_profile_1d] * dim, name="triangular_product")
    if kind == "gaussian_product":
        return quasi_concave_product([gaussian_profile_1d] * dim, name="gaussian_product")
    if kind == "cauchy_product":
        return quasi_concave_product([cauchy_profile_1d] * dim, name="cauchy_product")
    if kind == "exponential":
        if dim != 1:
            raise ValueError("exponential density is one-dimensional")
        return log_concave_exp(lambda x: np.abs(x[:, 0]), 1, name="exponential")
    if kind == "tabulated":
        path = Path(kw["path"])
        if not path.exists():
            raise FileNotFoundError(path)
        return log_concave_exp(np.loadtxt(path, delimiter=","), 1, name=path.stem)
    raise ValueError(f"unknown density {kind!r}")


def _profile_values(kind: str, pts: np.ndarray, kw: dict) -> np.ndarray:
    center = _floats(kw.get("center", 0.0), pts.shape[1])
    scale = _floats(kw.get("scale", 1.0), pts.shape[1])
    height = float(kw.get("height", 1.0))
    z = (pts - center) / scale
    if kind == "gaussian_profile":
        return height * np.exp(-0.5 * np.sum(z**2, axis=1))
    if kind == "triangular_profile":
        return height * np.prod(np.maximum(1.0 - np.abs(z), 0.0), axis=1)
    if kind == "exponential_profile":
        return height * np.exp(-np.sum(np.abs(z), axis=1))
    if kind == "min_triangular_profile":
        return height * np.min(np.maximum(1.0 - np.abs(z), 0.0), axis=1)
    raise ValueError(f"unknown profile {kind!r}")


def make_function(kind: str, grid: Grid, **kw) -> GridFunction:
    """Indicators of named sets, or named profiles, sampled at cell centers."""
    kind = kind.lower()
    height = float(kw.get("height", 1.0))
    if kind in ("interval", "box", "ball", "polygon"):
        S = make_set(kind, grid, **kw)
        return GridFunction.indicator(grid, S.mask, height)
    if kind == "tabulated_profile":
        path = Path(kw["path"])
        if not path.exists():
            raise FileNotFoundError(path)
        tab = np.loadtxt(path, delimiter=",")
        if grid.dim != 1:
            raise ValueError("tabulated profiles are one-dimensional")
        return GridFunction.from_callable(
            grid, lambda x: np.interp(x[:, 0], tab[:, 0], tab[:, 1], left=0.0, right=0.0))
    fn = GridFunction.from_callable(grid, lambda x: _profile_values(kind, x, kw))
    if kw.get("normalize") and fn.sup > 0:
        # Rescale so the sampled peak equals ``height`` exactly.
        fn = fn.scaled_values(height / fn.sup)
    return fn


def make_set(kind: str, grid: Grid, **kw) -> SampledSet:
    kind = kind.lower()
    n = grid.dim
    if kind in ("interval", "box"):
        return box_set(grid, _floats(kw["lo"], n), _floats(kw["hi"], n))
    if kind == "ball":
        c = _floats(kw.get("center", 0.0), n)
        return ball_set(grid, float(kw.get("radius", 1.0)), c)
    if kind == "polygon":
        V = _floats(kw["vertices"]).reshape(-1, 2)
        return polygon_set(grid, V)
    raise ValueError(f"unknown set {kind!r}")


def make_body(kind: str, dim: int, **kw) -> SupportBody:
    kind = kind.lower()
    count = int(kw.get("directions", 360))
    if kind in ("interval", "box"):
        lo, hi = _floats(kw["lo"], dim), _floats(kw["hi"], dim)
        return SupportBody.interval(lo[0], hi[0]) if dim == 1 else SupportBody.box(lo, hi, count)
    if kind == "ball":
        return SupportBody.ball(float(kw.get("radius", 1.0)), dim, count)
    if kind == "polygon":
        return SupportBody.from_points(_floats(kw["vertices"]).reshape(-1, 2), 2, count)
    raise ValueError(f"unknown body {kind!r}")


# ---------------------------------------------------------------------------
# built-in suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SuiteCase:
    theorem: TheoremId
    fixture: Fixture
    p_grid: tuple
    t_grid: tuple
    s_grid: tuple = (1.0,)
    expect_applicable: bool = True
    lambda_grid: int = 129


T_GRID = (0.1, 0.3, 0.5, 0.7, 0.9)
P_GRID = (1.0, 1.5, 2.0, 4.0)
S_GRID = (0.0, 1.0, 2.0, math.inf)


def _grid1(lo: float, hi: float, res: int) -> Grid:
    return Grid.box(lo, hi, res)


def bbl_fixtures(res: int = DEFAULT_RESOLUTION) -> list[Fixture]:
    G = _grid1(-2.0, 2.0, res)
    L = lebesgue(1)
    return [
        Fixture("indicators", L, f=make_function("interval", G, lo=-0.5, hi=0.5),
                g=make_function("interval", G, lo=0.0, hi=1.5, height=2.0)),
        Fixture("triangular", L, f=make_function("triangular_profile", G),
                g=make_function("triangular_profile", G, center=0.5, scale=0.5, height=1.5)),
        Fixture("gaussian", L, f=make_function("gaussian_profile", G, scale=0.5),
                g=make_function("gaussian_profile", G, center=0.3, scale=0.3, height=0.7)),
    ]


def bbl_fixtures_2d(res: int = DEFAULT_RESOLUTION_2D) -> list[Fixture]:
    G = Grid.box([-1.5, -1.5], [1.5, 1.5], res)
    L = lebesgue(2)
    return [
        Fixture("boxes2d", L, f=make_function("box", G, lo=[-0.5, -0.5], hi=[0.5, 0.5]),
                g=make_function("box", G, lo=[0.0, -1.0], hi=[1.0, 0.5])),
    ]


def set_fixtures(res: int = DEFAULT_RESOLUTION) -> list[Fixture]:
    G = _grid1(-1.0, 2.0, res)
    L = lebesgue(1)
    G2 = Grid.box([-1.5, -1.5], [1.5, 1.5], DEFAULT_RESOLUTION_2D)
    return [
        Fixture("equal_intervals", L, A=make_set("interval", G, lo=0.0, hi=1.0),
                B=make_set("interval", G, lo=0.0, hi=1.0)),
        Fixture("intervals", L, A=make_set("interval", G, lo=-0.5, hi=0.5),
                B=make_set("interval", G, lo=0.25, hi=1.75)),
        Fixture("rectangles", lebesgue(2), A=make_set("box", G2, lo=[-0.5, -0.25], hi=[0.5, 0.25]),
                B=make_set("box", G2, lo=[-0.25, -1.0], hi=[0.75, 1.0])),
    ]


def sconcave_fixtures(res: int = DEFAULT_RESOLUTION) -> list[Fixture]:
    G = _grid1(-1.0, 1.0, res)
    tri = sconcave_power(1.0, 1)
    G2 = Grid.box([-1.0, -1.0], [1.0, 1.0], DEFAULT_RESOLUTION_2D)
    cone = sconcave_power(1.0, 2)
    return [
        Fixture("triangular", tri, A=make_set("interval", G, lo=0.0, hi=0.5),
                B=make_set("interval", G, lo=0.0, hi=0.8)),
        Fixture("triangular_equal", tri, A=make_set("interval", G, lo=-0.25, hi=0.5),
                B=make_set("interval", G, lo=-0.25, hi=0.5)),
        Fixture("cone", cone, A=make_set("box", G2, lo=[-0.5, -0.5], hi=[0.5, 0.5]),
                B=make_set("ball", G2, radius=0.6)),
        Fixture("cone_equal", cone, A=make_set("ball", G2, radius=0.5),
                B=make_set("ball", G2, radius=0.5)),
    ]


def product_function_fixtures(res: int = DEFAULT_RESOLUTION) -> list[Fixture]:
    G = _grid1(-2.0, 2.0, res)
    G2 = Grid.box([-2.0, -2.0], [2.0, 2.0], DEFAULT_RESOLUTION_2D)
    gp1 = make_density("gaussian_product", 1)
    tp2 = make_density("triangular_product", 2)
    gp2 = make_density("gaussian_product", 2)
    return [
        Fixture("gaussian_product_1d", gp1, f=make_function("gaussian_profile", G, scale=0.7),
                g=make_function("exponential_profile", G, scale=0.5, height=2.0)),
        Fixture("gaussian_product_2d", gp2, f=make_function("gaussian_profile", G2, scale=0.8),
                g=make_function("box", G2, lo=[-0.5, -1.0], hi=[1.0, 0.5])),
        Fixture("triangular_product_2d", tp2, f=make_function("triangular_profile", G2),
                g=make_function("exponential_profile", G2, scale=0.4)),
    ]


def product_set_fixtures(res: int = DEFAULT_RESOLUTION) -> list[Fixture]:
    G = _grid1(-2.0, 2.0, res)
    G2 = Grid.box([-1.5, -1.5], [1.5, 1.5], DEFAULT_RESOLUTION_2D)
    gp1 = make_density("gaussian_product", 1)
    gp2 = make_density("gaussian_product", 2)
    tp2 = make_density("triangular_product", 2)
    return [
        Fixture("gaussian_intervals", gp1, A=make_set("interval", G, lo=-0.5, hi=1.0),
                B=make_set("interval", G, lo=-1.5, hi=0.25)),
        Fixture("gaussian_boxes", gp2, A=make_set("box", G2, lo=[-0.5, -0.25], hi=[1.0, 0.5]),
                B=make_set("box", G2, lo=[-1.0, -1.0], hi=[0.25, 0.75])),
        Fixture("triangular_boxes", tp2, A=make_set("box", G2, lo=[-0.5, -0.5], hi=[0.5, 0.5]),
                B=make_set("box", G2, lo=[-0.25, -0.75], hi=[0.75, 0.25])),
    ]


def non_unconditional_fixture(res: int = DEFAULT_RESOLUTION) -> Fixture:
    G = _grid1(-2.0, 2.0, res)
    return Fixture("shifted_interval", make_density("gaussian_product", 1),
                   A=make_set("interval", G, lo=0.5, hi=1.5),
                   B=make_set("interval", G, lo=-0.5, hi=0.5),
                   f=make_function("interval", G, lo=0.5, hi=1.5),
                   g=make_function("interval", G, lo=-0.5, hi=0.5))


def lemma_fixtures(res: int = DEFAULT_RESOLUTION) -> list[Fixture]:
    G = _grid1(-2.0, 2.0, res)
    out = []
    for name in ("gaussian_product", "triangular_product", "cauchy_product"):
        mu = make_density(name, 1)
        out.append(Fixture(f"{name}_intervals", mu, A=make_set("interval", G, lo=-0.25, hi=1.0),
                           B=make_set("interval", G, lo=-1.0, hi=0.5)))
    return out


def pl_fixtures(res: int = DEFAULT_RESOLUTION) -> list[Fixture]:
    G = _grid1(-3.0, 3.0, res)
    f = make_function("gaussian_profile", G, scale=0.6)
    g = make_function("gaussian_profile", G, center=0.5, scale=0.9, height=0.5)
    return [Fixture("gaussian_profiles", lebesgue(1), f=f, g=g),
            Fixture("gaussian_profiles_gaussian_measure", gaussian(1), f=f, g=g)]


def mfi_fixtures(res: int = DEFAULT_RESOLUTION) -> list[Fixture]:
    G = _grid1(-1.0, 2.0, res)
    L = lebesgue(1)
    f = make_function("interval", G, lo=0.0, hi=1.0)
    Gg = _grid1(-2.0, 2.0, res)
    return [
        Fixture("indicator_self", L, f=f, g=f),
        Fixture("indicator_other", L, f=f, g=make_function("interval", G, lo=-0.25, hi=0.5)),
        Fixture("indicator_scaled", L, f=f, g=make_function("interval", G, lo=0.0, hi=1.0, height=1.5)),
        Fixture("gaussian_indicators", gaussian(1), f=make_function("interval", Gg, lo=-1.0, hi=1.0),
                g=make_function("interval", Gg, lo=-0.5, hi=1.5)),
    ]


def body_fixtures() -> list[Fixture]:
    L1, L2 = lebesgue(1), lebesgue(2)
    return [
        Fixture("lebesgue_intervals", L1, K=SupportBody.interval(-1.0, 1.0),
                L=SupportBody.interval(-0.5, 2.0)),
        Fixture("lebesgue_equal_intervals", L1, K=SupportBody.interval(-1.0, 1.0),
                L=SupportBody.interval(-1.0, 1.0)),
        Fixture("lebesgue_disk_box", L2, K=SupportBody.ball(1.0, 2, 180),
                L=SupportBody.box([-0.5, -1.0], [1.5, 0.5], 180)),
        Fixture("triangular_intervals", sconcave_power(1.0, 1), K=SupportBody.interval(-0.5, 0.5),
                L=SupportBody.interval(-0.25, 0.75)),
        Fixture("gaussian_intervals", gaussian(1), K=SupportBody.interval(-1.0, 1.0),
                L=SupportBody.interval(-0.5, 1.5)),
        Fixture("gaussian_equal", gaussian(1), K=SupportBody.interval(-1.0, 1.5),
                L=SupportBody.interval(-1.0, 1.5)),
        Fixture("gaussian_disk_box", gaussian(2), K=SupportBody.ball(1.0, 2, 180),
                L=SupportBody.box([-0.25, -2.0], [2.0, 0.5], 180)),
    ]


def gz_function_fixtures(res: int = DEFAULT_RESOLUTION_2D) -> list[Fixture]:
    G2 = Grid.box([-1.5, -1.5], [1.5, 1.5], res)
    G1 = _grid1(-2.0, 2.0, DEFAULT_RESOLUTION)
    gp2 = make_density("gaussian_product", 2)
    tp2 = make_density("triangular_product", 2)
    return [
        Fixture("boxes_gaussian", gp2, f=make_function("box", G2, lo=[-0.5, -0.25], hi=[1.0, 0.5]),
                g=make_function("box", G2, lo=[-1.0, -1.0], hi=[0.25, 0.75])),
        Fixture("min_profiles_triangular", tp2,
                f=make_function("min_triangular_profile", G2, scale=[1.0, 0.6], normalize=True),
                g=make_function("min_triangular_profile", G2, scale=[0.5, 1.2], normalize=True)),
        Fixture("intervals_gaussian_1d", make_density("gaussian_product", 1),
                f=make_function("triangular_profile", G1, scale=1.5, normalize=True),
                g=make_function("interval", G1, lo=-0.25, hi=1.0)),
    ]


def gz_nonproduct_fixture(res: int = DEFAULT_RESOLUTION_2D) -> Fixture:
    G2 = Grid.box([-1.5, -1.5], [1.5, 1.5], res)
    return Fixture("disk_nonproduct", make_density("gaussian_product", 2),
                   f=make_function("ball", G2, radius=1.0),
                   g=make_function("box", G2, lo=[-0.5, -0.5], hi=[0.5, 0.5]))


def log_concave_body_family() -> list[Fixture]:
    g1, g2 = gaussian(1), gaussian(2)
    expo = make_density("exponential", 1)
    return [
        Fixture("gauss_sym", g1, K=SupportBody.interval(-1.0, 1.0), L=SupportBody.interval(-1.0, 1.0)),
        Fixture("gauss_nested", g1, K=SupportBody.interval(-1.0, 1.0), L=SupportBody.interval(-2.0, 2.0)),
        Fixture("gauss_shifted", g1, K=SupportBody.interval(-0.05, 3.0), L=SupportBody.interval(-3.0, 0.05)),
        Fixture("gauss_thin", g1, K=SupportBody.interval(-0.01, 0.02), L=SupportBody.interval(-4.0, 4.0)),
        Fixture("expo_shifted", expo, K=SupportBody.interval(-0.1, 2.0), L=SupportBody.interval(-2.0, 0.1)),
        Fixture("gauss2_disk_box", g2, K=SupportBody.ball(0.5, 2, 180),
                L=SupportBody.box([-0.1, -0.1], [3.0, 3.0], 180)),
    ]


def radial_decay_fixtures() -> list[Fixture]:
    return [
        Fixture("gaussian_shifted", gaussian(1), K=SupportBody.interval(-1.0, 1.0),
                L=SupportBody.interval(-0.5, 1.5)),
        Fixture("triangular_shifted", sconcave_power(1.0, 1), K=SupportBody.interval(-0.2, 0.9),
                L=SupportBody.interval(-0.8, 0.1)),
        Fixture("gaussian2_disk_box", gaussian(2), K=SupportBody.ball(1.0, 2, 180),
                L=SupportBody.box([-0.25, -0.25], [2.0, 1.0], 180)),
    ]


def builtin_suite(resolution: int = DEFAULT_RESOLUTION) -> list[SuiteCase]:
    """Every theorem id with fixtures that satisfy its hypotheses, plus rejections."""
    r = resolution
    T = TheoremId
    cases: list[SuiteCase] = []
    for fx in bbl_fixtures(r):
        cases.append(SuiteCase(T.BBL, fx, (1.0,), T_GRID, S_GRID))
        cases.append(SuiteCase(T.LP_BBL, fx, P_GRID, T_GRID, S_GRID))
    for fx in bbl_fixtures_2d():
        cases.append(SuiteCase(T.LP_BBL, fx, (1.0, 2.0), (0.3, 0.7), (0.0, 1.0, math.inf), lambda_grid=33))
    for fx in set_fixtures(r):
        lg = 33 if fx.dim == 2 else 129
        cases.append(SuiteCase(T.LP_BMI_SETS, fx, P_GRID, T_GRID, lambda_grid=lg))
    for fx in sconcave_fixtures(r):
        lg = 33 if fx.dim == 2 else 129
        cases.append(SuiteCase(T.LP_BMI_SCONCAVE, fx, P_GRID, T_GRID, lambda_grid=lg))
    for fx in product_function_fixtures(r):
        lg = 33 if fx.dim == 2 else 129
        cases.append(SuiteCase(T.LP_PLI_PRODUCT, fx, (1.0, 2.0, 4.0), (0.3, 0.5, 0.7), lambda_grid=lg))
    for fx in product_set_fixtures(r):
        lg = 33 if fx.dim == 2 else 129
        cases.append(SuiteCase(T.LP_PLI_SETS, fx, (1.5, 2.0, 4.0), T_GRID, lambda_grid=lg))
        cases.append(SuiteCase(T.LP_BMI_PRODUCT, fx, (1.5, 2.0, 4.0), T_GRID, lambda_grid=lg))
    bad = non_unconditional_fixture(r)
    for th in (T.LP_PLI_PRODUCT, T.LP_PLI_SETS, T.LP_BMI_PRODUCT):
        cases.append(SuiteCase(th, bad, (2.0,), (0.5,), expect_applicable=False))
    for fx in lemma_fixtures(r):
        cases.append(SuiteCase(T.LEMMA_1D, fx, P_GRID, T_GRID, lambda_grid=33))
    for fx in pl_fixtures(r):
        cases.append(SuiteCase(T.PL_RECOVERY, fx, (1.0,), T_GRID, (math.inf,)))
    for fx in mfi_fixtures(r):
        if fx.mu.is_lebesgue:
            cases.append(SuiteCase(T.MFI, fx, (1.0, 2.0), (0.5,), (1.0, 2.0), lambda_grid=33))
        else:
            cases.append(SuiteCase(T.MFI, fx, (1.0, 2.0), (0.5,), (math.inf,), lambda_grid=33))
    for fx in body_fixtures():
        cases.append(SuiteCase(T.ISMI, fx, (1.0, 2.0, 4.0), (0.5,)))
    for fx in gz_function_fixtures():
        cases.append(SuiteCase(T.GZ_PRODUCT_MIN, fx, (1.0,), (0.3, 0.5, 0.7), lambda_grid=33))
        cases.append(SuiteCase(T.GZ_LP_PRODUCT, fx, (1.0, 2.0), (0.3, 0.5, 0.7), lambda_grid=33))
    cases.append(SuiteCase(T.GZ_PRODUCT_MIN, gz_nonproduct_fixture(), (1.0,), (0.5,),
                           expect_applicable=False))
    for fx in log_concave_body_family():
        cases.append(SuiteCase(T.GZ_LOGCONCAVE_C, fx, (1.0, 2.0, 4.0), T_GRID))
    for fx in radial_decay_fixtures():
        cases.append(SuiteCase(T.GZ_RADIAL_DECAY, fx, (1.0, 2.0, 4.0), T_GRID))
    return cases


def log_concave_function_family(res: int = 480) -> list[GridFunction]:
    """Log-concave functions with maximum at the origin, for ball-body checks."""
    G1 = _grid1(-12.0, 12.0, res)
    G2 = Grid.box([-8.0, -8.0], [8.0, 8.0], 128)
    return [
        make_function("exponential_profile", G1),
        make_function("gaussian_profile", G1),
        GridFunction.from_callable(G1, lambda x: np.where(x[:, 0] >= 0, np.exp(-x[:, 0]), 0.0)),
        make_function("interval", _grid1(-2.0, 2.0, 64), lo=-1.0, hi=1.0),
        make_function("gaussian_profile", G2),
        make_function("exponential_profile", G2),
    ]
