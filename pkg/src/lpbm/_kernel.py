"""Compiled sup-convolution kernel for piecewise-constant inputs.

For a query point z and coefficients (a, b) the kernel visits the cells of
the input with the smaller coefficient, maps each one to the box of partner
points x = (z - b y) / a, and takes the largest partner value over the cells
that box meets.  This is the exact supremum for functions that are constant
on cells.  Inputs are padded to three axes.
"""

import os

os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

import numpy as np  # noqa: E402
from numba import config, njit, prange, set_num_threads  # noqa: E402

RULE_POWER = 0
RULE_MAX = 1
RULE_GEOMETRIC = 2
RULE_MIN = 3

THREADS_ENV = "LPBM_THREADS"


def apply_thread_setting():
    n = os.environ.get(THREADS_ENV)
    if n:
        set_num_threads(max(1, min(int(n), config.NUMBA_NUM_THREADS)))


@njit(cache=True)
def combine(rule, s, a, b, fv, gv):
    if rule == RULE_POWER:
        inv = 1.0 / s
        return (a * fv**inv + b * gv**inv) ** s
    if rule == RULE_GEOMETRIC:
        return fv**a * gv**b
    if a == 0.0:
        return gv
    if b == 0.0:
        return fv
    if rule == RULE_MAX:
        return max(fv, gv)
    return min(fv, gv)


@njit(cache=True)
def _box_max(vals, lo, h, ilo_b, ihi_b, xlo0, xhi0, xlo1, xhi1, xlo2, xhi2):
    i0 = max(int(np.floor((xlo0 - lo[0]) / h[0])), ilo_b[0])
    j0 = min(int(np.ceil((xhi0 - lo[0]) / h[0])) - 1, ihi_b[0])
    if i0 > j0:
        return 0.0
    i1 = max(int(np.floor((xlo1 - lo[1]) / h[1])), ilo_b[1])
    j1 = min(int(np.ceil((xhi1 - lo[1]) / h[1])) - 1, ihi_b[1])
    if i1 > j1:
        return 0.0
    i2 = max(int(np.floor((xlo2 - lo[2]) / h[2])), ilo_b[2])
    j2 = min(int(np.ceil((xhi2 - lo[2]) / h[2])) - 1, ihi_b[2])
    if i2 > j2:
        return 0.0
    m = 0.0
    for u in range(i0, j0 + 1):
        for v in range(i1, j1 + 1):
            for w in range(i2, j2 + 1):
                x = vals[u, v, w]
                if x > m:
                    m = x
    return m


@njit(cache=True)
def _point_value(vals, lo, h, shape, x0, x1, x2):
    u = int(np.floor((x0 - lo[0]) / h[0]))
    v = int(np.floor((x1 - lo[1]) / h[1]))
    w = int(np.floor((x2 - lo[2]) / h[2]))
    if u < 0 or v < 0 or w < 0 or u >= shape[0] or v >= shape[1] or w >= shape[2]:
        return 0.0
    return vals[u, v, w]


@njit(cache=True)
def _query(z, A, B, rule, s,
           flo, fh, fshape, fvals, fcells, fcellv, fib_lo, fib_hi, fbb_lo, fbb_hi, fmax,
           glo, gh, gshape, gvals, gcells, gcellv, gib_lo, gib_hi, gbb_lo, gbb_hi, gmax,
           pruned):
    best = 0.0
    for k in range(A.shape[0]):
        a = A[k]
        b = B[k]
        if a == 0.0 and b == 0.0:
            continue
        if pruned and combine(rule, s, a, b, fmax, gmax) <= best:
            continue
        outside = False
        for d in range(3):
            if z[d] < a * fbb_lo[d] + b * gbb_lo[d] or z[d] > a * fbb_hi[d] + b * gbb_hi[d]:
                outside = True
        if outside:
            continue
        if b == 0.0:
            fv = _point_value(fvals, flo, fh, fshape, z[0] / a, z[1] / a, z[2] / a)
            if fv > 0.0:
                val = combine(rule, s, a, 0.0, fv, 1.0)
                if val > best:
                    best = val
            continue
        if a == 0.0:
            gv = _point_value(gvals, glo, gh, gshape, z[0] / b, z[1] / b, z[2] / b)
            if gv > 0.0:
                val = combine(rule, s, 0.0, b, 1.0, gv)
                if val > best:
                    best = val
            continue
        if a >= b:
            r = b / a
            for c in range(gcells.shape[0]):
                gv = gcellv[c]
                if pruned and combine(rule, s, a, b, fmax, gv) <= best:
                    break
                y0 = glo[0] + (gcells[c, 0] + 0.5) * gh[0]
                y1 = glo[1] + (gcells[c, 1] + 0.5) * gh[1]
                y2 = glo[2] + (gcells[c, 2] + 0.5) * gh[2]
                fv = _box_max(fvals, flo, fh, fib_lo, fib_hi,
                              z[0] / a - r * (y0 + 0.5 * gh[0]), z[0] / a - r * (y0 - 0.5 * gh[0]),
                              z[1] / a - r * (y1 + 0.5 * gh[1]), z[1] / a - r * (y1 - 0.5 * gh[1]),
                              z[2] / a - r * (y2 + 0.5 * gh[2]), z[2] / a - r * (y2 - 0.5 * gh[2]))
                if fv > 0.0:
                    val = combine(rule, s, a, b, fv, gv)
                    if val > best:
                        best = val
        else:
            r = a / b
            for c in range(fcells.shape[0]):
                fv = fcellv[c]
                if pruned and combine(rule, s, a, b, fv, gmax) <= best:
                    break
                x0 = flo[0] + (fcells[c, 0] + 0.5) * fh[0]
                x1 = flo[1] + (fcells[c, 1] + 0.5) * fh[1]
                x2 = flo[2] + (fcells[c, 2] + 0.5) * fh[2]
                gv = _box_max(gvals, glo, gh, gib_lo, gib_hi,
                              z[0] / b - r * (x0 + 0.5 * fh[0]), z[0] / b - r * (x0 - 0.5 * fh[0]),
                              z[1] / b - r * (x1 + 0.5 * fh[1]), z[1] / b - r * (x1 - 0.5 * fh[1]),
                              z[2] / b - r * (x2 + 0.5 * fh[2]), z[2] / b - r * (x2 - 0.5 * fh[2]))
                if gv > 0.0:
                    val = combine(rule, s, a, b, fv, gv)
                    if val > best:
                        best = val
    return best


@njit(cache=True, parallel=True)
def sup_kernel(Z, A, B, rule, s,
               flo, fh, fshape, fvals, fcells, fcellv, fib_lo, fib_hi, fbb_lo, fbb_hi, fmax,
               glo, gh, gshape, gvals, gcells, gcellv, gib_lo, gib_hi, gbb_lo, gbb_hi, gmax,
               pruned):
    out = np.zeros(Z.shape[0])
    for q in prange(Z.shape[0]):
        out[q] = _query(Z[q], A, B, rule, s,
                        flo, fh, fshape, fvals, fcells, fcellv, fib_lo, fib_hi, fbb_lo, fbb_hi, fmax,
                        glo, gh, gshape, gvals, gcells, gcellv, gib_lo, gib_hi, gbb_lo, gbb_hi, gmax,
                        pruned)
    return out
