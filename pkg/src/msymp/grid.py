"""Uniform grids and second-order centered difference stencils."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, UsageError


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on ``[0, length)``."""

    n_cells: int
    length: float = 1.0

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 8:
            raise ConfigError(f"n_cells must be an integer >= 8, got {self.n_cells}")
        if not self.length > 0:
            raise ConfigError(f"length must be positive, got {self.length}")

    periodic = True

    @property
    def dx(self) -> float:
        return self.length / self.n_cells

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n_cells) * self.dx


@dataclass(frozen=True)
class RadialGrid:
    """Non-periodic uniform grid on ``[r_min, r_max]`` (both ends included)."""

    n_cells: int
    r_min: float = 1.0
    r_max: float = 3.0

    periodic = False

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 8:
            raise ConfigError(f"n_cells must be an integer >= 8, got {self.n_cells}")
        if not (0 < self.r_min < self.r_max):
            raise ConfigError("need 0 < r_min < r_max (the axis r = 0 is excluded)")

    @property
    def length(self) -> float:
        return self.r_max - self.r_min

    @property
    def dx(self) -> float:
        return self.length / self.n_cells

    @property
    def x(self) -> np.ndarray:
        return self.r_min + np.arange(self.n_cells + 1) * self.dx


def ddx(f, grid, slope=0.0):
    """Centered first derivative along the last axis.

    Periodic grids wrap around; ``slope`` adds the exact derivative of a
    linear part that is not stored in ``f``.  Non-periodic grids use
    one-sided second-order formulas at the two ends.
    """
    f = np.asarray(f)
    if getattr(grid, "periodic", True):
        return (np.roll(f, -1, axis=-1) - np.roll(f, 1, axis=-1)) / (2.0 * grid.dx) + slope
    return np.gradient(f, grid.dx, axis=-1, edge_order=2) + slope


def centered(f, h, axis, periodic):
    """Second-order centered difference of ``f`` along ``axis``.

    Non-periodic axes get NaN at the two end planes, so downstream norms
    silently exclude them.
    """
    f = np.asarray(f)
    if periodic:
        return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2.0 * h)
    out = np.full(f.shape, np.nan, dtype=np.result_type(f, float))
    f = np.moveaxis(f, axis, 0)
    o = np.moveaxis(out, axis, 0)
    o[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    return out


def centered_edge(f, h, axis):
    """Second-order difference with one-sided ends (for bounded spatial grids)."""
    return np.gradient(np.asarray(f), h, axis=axis, edge_order=2)


def require_uniform(times, rtol=1e-9) -> float:
    times = np.asarray(times, dtype=float)
    if times.size < 3:
        raise UsageError("need at least three snapshots for centered time differences")
    steps = np.diff(times)
    if np.max(np.abs(steps - steps[0])) > rtol * abs(steps[0]):
        raise UsageError("snapshot times are not uniformly spaced")
    return float(steps.mean())
