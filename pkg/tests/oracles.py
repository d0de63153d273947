"""Independent reference computations used to derive frozen expected values.

Nothing here imports the package under test; each oracle follows the
mathematical definition by brute force or by a closed form.
"""

from __future__ import annotations

import math

import numpy as np


def erf_series(x: float, terms: int = 80) -> float:
    """Maclaurin series of the error function; accurate to ~1e-15 for |x| <= 3."""
    total, term = 0.0, x
    for k in range(terms):
        total += term / (2 * k + 1)
        term *= -x * x / (k + 1)
    return 2.0 / math.sqrt(math.pi) * total


def gaussian_interval_measure(a: float, b: float) -> float:
    """Standard normal mass of [a, b]."""
    r = 1.0 / math.sqrt(2.0)
    return 0.5 * (erf_series(b * r) - erf_series(a * r))


def power_mean(alpha: float, t: float, a: float, b: float) -> float:
    """M_alpha^t(a, b) straight from the definition."""
    if a * b == 0:
        return 0.0
    if alpha == math.inf:
        return max(a, b)
    if alpha == -math.inf:
        return min(a, b)
    if alpha == 0:
        return a ** (1 - t) * b**t
    return ((1 - t) * a**alpha + t * b**alpha) ** (1 / alpha)


def lp_weights(p: float, t: float, lam: float) -> tuple[float, float]:
    q = (p - 1) / p
    return (1 - t) ** (1 / p) * (1 - lam) ** q, t ** (1 / p) * lam**q


def lp_interval_combination(A: tuple, B: tuple, p: float, t: float, n_lam: int = 200001) -> tuple:
    """Hull of the L_p combination of two intervals by dense lambda sampling."""
    lam = np.linspace(0.0, 1.0, n_lam)
    q = (p - 1) / p
    wa = (1 - t) ** (1 / p) * (1 - lam) ** q
    wb = t ** (1 / p) * lam**q
    lo = np.minimum(wa * A[0], wa * A[1]) + np.minimum(wb * B[0], wb * B[1])
    hi = np.maximum(wa * A[0], wa * A[1]) + np.maximum(wb * B[0], wb * B[1])
    return float(lo.min()), float(hi.max())


def holder_endpoint(a: float, b: float, p: float, t: float) -> float:
    """max over lambda of wA a + wB b for a, b >= 0: the p-mean of a and b."""
    return ((1 - t) * a**p + t * b**p) ** (1 / p)


def brute_force_bbl_1d(f_lo: float, f_h: float, f_vals, g_lo: float, g_h: float, g_vals,
                       t: float, s: float, z: np.ndarray) -> np.ndarray:
    """Single-lambda (p = 1) supremal convolution of cellwise-constant inputs.

    h(z) = sup M_{1/s}^t(f(x), g(y)) over z = (1-t) x + t y with x, y in
    positive cells, counting a cell pair when z is interior to the image
    interval (1-t) cell_i + t cell_j.
    """
    alpha = math.inf if s == 0 else (0.0 if math.isinf(s) else 1.0 / s)
    fi = [(i, v) for i, v in enumerate(f_vals) if v > 0]
    gj = [(j, v) for j, v in enumerate(g_vals) if v > 0]
    out = np.zeros(len(z))
    for i, fv in fi:
        for j, gv in gj:
            lo = (1 - t) * (f_lo + i * f_h) + t * (g_lo + j * g_h)
            hi = lo + (1 - t) * f_h + t * g_h
            val = power_mean(alpha, t, fv, gv)
            inside = (z > lo) & (z < hi)
            out[inside] = np.maximum(out[inside], val)
    return out


def minkowski_interval(A: tuple, B: tuple, a: float, b: float) -> tuple:
    return a * A[0] + b * B[0], a * A[1] + b * B[1]


def unit_ball_volume(k: int) -> float:
    return math.pi ** (k / 2) / math.gamma(k / 2 + 1)


def midpoint_radial_integral(func, q: float, R: float, n: int = 200000) -> float:
    r = (np.arange(n) + 0.5) * (R / n)
    return float(np.sum(func(r) * r ** (q - 1)) * (R / n))
