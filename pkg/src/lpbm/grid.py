"""Uniform cell grids and piecewise-constant functions on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Axis-aligned box split into ``shape`` equal cells per axis."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    shape: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.lo) == len(self.hi) == len(self.shape)):
            raise ValueError("lo, hi and shape must have equal length")
        if not 1 <= len(self.shape) <= 4:
            raise ValueError("grid dimension must be between 1 and 4")
        for a, b, n in zip(self.lo, self.hi, self.shape):
            if not (np.isfinite(a) and np.isfinite(b) and b > a):
                raise ValueError(f"invalid box extent [{a}, {b}]")
            if n < 1:
                raise ValueError("shape entries must be positive")

    @classmethod
    def box(cls, lo, hi, resolution) -> "Grid":
        """Grid on the box [lo, hi]; scalars broadcast to the common dimension."""
        lo_a = np.atleast_1d(np.asarray(lo, dtype=float))
        hi_a = np.atleast_1d(np.asarray(hi, dtype=float))
        res_a = np.atleast_1d(np.asarray(resolution, dtype=int))
        dim = max(lo_a.size, hi_a.size, res_a.size)
        lo_a, hi_a, res_a = (np.broadcast_to(a, (dim,)) for a in (lo_a, hi_a, res_a))
        return cls(
            tuple(float(v) for v in lo_a),
            tuple(float(v) for v in hi_a),
            tuple(int(v) for v in res_a),
        )

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def step(self) -> np.ndarray:
        return (np.array(self.hi) - np.array(self.lo)) / np.array(self.shape)

    @property
    def max_step(self) -> float:
        return float(self.step.max())

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.step))

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def axis_centers(self, axis: int) -> np.ndarray:
        h = self.step[axis]
        return self.lo[axis] + (np.arange(self.shape[axis]) + 0.5) * h

    def centers(self) -> np.ndarray:
        """Cell centers as an array of shape ``shape + (dim,)``."""
        axes = [self.axis_centers(i) for i in range(self.dim)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def points(self) -> np.ndarray:
        return self.centers().reshape(-1, self.dim)

    def cell_index(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Integer cell indices of points and a mask of points inside the box."""
        pts = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        rel = (pts - np.array(self.lo)) / self.step
        idx = np.floor(rel).astype(np.int64)
        inside = np.all((rel >= 0) & (rel <= np.array(self.shape)), axis=1)
        idx = np.clip(idx, 0, np.array(self.shape) - 1)
        return idx, inside

    def scaled(self, c: float) -> "Grid":
        """The image grid under x -> c x (c > 0)."""
        return Grid(tuple(c * a for a in self.lo), tuple(c * b for b in self.hi), self.shape)

    def contains_box(self, other: "Grid", tol: float = 1e-12) -> bool:
        return all(
            a <= c + tol and d <= b + tol
            for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi)
        )


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nonnegative function, constant on each cell of ``grid``.

    ``values[i]`` is the value on cell ``i`` (for grids built from a closed
    form, the value at the cell center).
    """

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        if np.any(vals < 0):
            raise ValueError("values must be nonnegative")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, grid: Grid, func: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        pts = grid.points()
        vals = np.asarray(func(pts), dtype=float).reshape(grid.shape)
        return cls(grid, vals)

    @classmethod
    def indicator(cls, grid: Grid, mask: np.ndarray, height: float = 1.0) -> "GridFunction":
        return cls(grid, np.where(np.asarray(mask, dtype=bool), float(height), 0.0))

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def mask(self) -> np.ndarray:
        return self.values > 0

    @property
    def sup(self) -> float:
        return float(self.values.max())

    def is_empty(self) -> bool:
        return not bool(np.any(self.values > 0))

    def at(self, pts: np.ndarray) -> np.ndarray:
        """Piecewise-constant evaluation; zero outside the box."""
        pts = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        idx, inside = self.grid.cell_index(pts)
        out = self.values[tuple(idx.T)]
        return np.where(inside, out, 0.0)

    def support_box(self) -> tuple[np.ndarray, np.ndarray]:
        """Bounding box of the support, using cell edges."""
        if self.is_empty():
            raise ValueError("empty support")
        lo = np.empty(self.dim)
        hi = np.empty(self.dim)
        h = self.grid.step
        for ax in range(self.dim):
            other = tuple(i for i in range(self.dim) if i != ax)
            occupied = np.nonzero(np.any(self.mask, axis=other) if other else self.mask)[0]
            lo[ax] = self.grid.lo[ax] + occupied[0] * h[ax]
            hi[ax] = self.grid.lo[ax] + (occupied[-1] + 1) * h[ax]
        return lo, hi

    def support_counts(self) -> np.ndarray:
        """Number of cells spanned by the support along each axis."""
        lo, hi = self.support_box()
        return np.rint((hi - lo) / self.grid.step).astype(int)

    def power(self, c: float) -> "GridFunction":
        vals = np.where(self.values > 0, self.values ** c, 0.0) if c != 0 else self.mask.astype(float)
        return GridFunction(self.grid, vals)

    def scaled_values(self, c: float) -> "GridFunction":
        return GridFunction(self.grid, c * self.values)


def symmetric_grid(half_width: float | Sequence[float], resolution: int, dim: int = 1) -> Grid:
    hw = np.broadcast_to(np.asarray(half_width, dtype=float), (dim,))
    return Grid.box(-hw, hw, resolution)
