"""Sampled complex functions on a 1-D grid."""

from __future__ import annotations

import dataclasses

import numpy as np


@dataclasses.dataclass(frozen=True)
class GridFunction:
    grid: np.ndarray
    values: np.ndarray
    meta: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if np.any(np.diff(grid) <= 0) or (grid.size and grid[0] < 0):
            raise ValueError("grid must be strictly increasing and nonnegative")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.grid.size

    def window(self, lo: float, hi: float) -> "GridFunction":
        m = (self.grid >= lo) & (self.grid <= hi)
        return GridFunction(self.grid[m], self.values[m], dict(self.meta))


def gauss_legendre_grid(a: float, b: float, n_panels: int, order: int = 16):
    """Composite Gauss-Legendre nodes and weights on [a, b].

    Sampling a function on these nodes lets :func:`grid_integral` integrate
    it (and its products with smooth kernels) to high order.
    """
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def grid_integral(f: GridFunction, integrand_values=None):
    """Integral over the grid using ``meta['weights']`` when present,
    otherwise Simpson's rule. ``integrand_values`` (broadcast against the
    last axis) replaces ``f.values`` if given."""
    v = f.values if integrand_values is None else integrand_values
    w = f.meta.get("weights")
    if w is not None:
        return np.sum(v * np.asarray(w), axis=-1)
    from scipy.integrate import simpson
    return simpson(v, x=f.grid, axis=-1)
