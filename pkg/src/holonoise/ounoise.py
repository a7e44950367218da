"""Stationary Ornstein-Uhlenbeck noise on a control-coordinate grid.

The squeezing control error dr(.) is a stationary Gaussian process with

    cov(dr(x), dr(x')) = sigma * exp(-gamma |x - x'|)

where ``sigma`` is the stationary *variance* and ``gamma`` the bandwidth
of the corresponding Lorentzian spectrum (the covariance decay rate).
The process is indexed by the transverse loop coordinate, not by time.

Sampling uses the exact stationary one-step update

    dr[0]   = sqrt(sigma) * xi[0]
    dr[k+1] = exp(-gamma h) dr[k] + sqrt(sigma (1 - exp(-2 gamma h))) xi[k+1]

with i.i.d. standard normal xi, so the marginal law is exact at any grid
spacing h; the spacing only matters for the quadratures downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_PLANE_TAGS = {"x": 0, "y": 1}

GRID_UNIFORMITY_TOL = 1e-12


@dataclass(frozen=True)
class OUParams:
    """Stationary variance and bandwidth of one noise process."""

    sigma: float
    gamma: float

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError(f"variance sigma must be finite and >= 0, got {self.sigma}")
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"bandwidth gamma must be finite and > 0, got {self.gamma}")


@dataclass(frozen=True)
class NoisePath:
    """One realization dr(.) sampled on a uniform grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("grid must be 1-D with at least two points")
        steps = np.diff(grid)
        if not np.all(steps > 0):
            raise ValueError("grid must be strictly increasing")
        if float(steps.max() - steps.min()) > GRID_UNIFORMITY_TOL:
            raise ValueError("grid must be uniform")
        if values.shape != grid.shape:
            raise ValueError("values and grid must have the same length")
        if not np.all(np.isfinite(values)):
            raise ValueError("noise values must be finite")

    @property
    def spacing(self) -> float:
        return float((self.grid[-1] - self.grid[0]) / (self.grid.size - 1))


@dataclass(frozen=True)
class RngStream:
    """Named, reproducible random stream for one (realization, plane) pair.

    Streams with distinct ids are statistically independent by the
    seed-sequence spawning guarantees, and the same (seed, id) always
    reproduces the same path bit for bit.
    """

    seed: int
    realization: int
    plane: str

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.realization < 0:
            raise ValueError("realization index must be >= 0")
        if self.plane not in _PLANE_TAGS:
            raise ValueError(f"plane tag must be 'x' or 'y', got {self.plane!r}")

    def generator(self) -> np.random.Generator:
        key = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.realization, _PLANE_TAGS[self.plane])
        )
        return np.random.default_rng(key)


def uniform_grid(start: float, end: float, max_spacing: float) -> np.ndarray:
    """Uniform grid spanning [start, end] exactly, spacing <= max_spacing."""
    if not end > start:
        raise ValueError(f"need end > start, got [{start}, {end}]")
    if not max_spacing > 0:
        raise ValueError(f"grid spacing must be positive, got {max_spacing}")
    n_cells = max(1, math.ceil((end - start) / max_spacing - 1e-9))
    return np.linspace(start, end, n_cells + 1)


def default_spacing(params: OUParams) -> float:
    """Default grid spacing: resolves the correlation length with >= 10 points."""
    return min(0.01, 0.1 / params.gamma)


def _resolve_grid(grid_spec) -> np.ndarray:
    if isinstance(grid_spec, np.ndarray):
        return grid_spec
    start, end, spacing = grid_spec
    return uniform_grid(start, end, spacing)


def sample_ou(params: OUParams, grid_spec, rng: RngStream | np.random.Generator) -> NoisePath:
    """Draw one stationary OU realization on the grid.

    ``grid_spec`` is either a (start, end, max_spacing) triple or an
    explicit uniform grid array. Uses the exact update from the module
    docstring, so there is no discretization bias in the marginal law.
    """
    grid = _resolve_grid(grid_spec)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    h = float(grid[1] - grid[0])
    decay = math.exp(-params.gamma * h)
    innovation = math.sqrt(params.sigma * (1.0 - decay * decay))
    xi = gen.standard_normal(grid.size)
    values = np.empty(grid.size)
    values[0] = math.sqrt(params.sigma) * xi[0]
    for k in range(1, grid.size):
        values[k] = decay * values[k - 1] + innovation * xi[k]
    return NoisePath(grid=grid, values=values)


def systematic_path(offset: float, grid_spec) -> NoisePath:
    """Constant path dr == offset: the systematic control error."""
    if not np.isfinite(offset):
        raise ValueError("offset must be finite")
    grid = _resolve_grid(grid_spec)
    return NoisePath(grid=grid, values=np.full(grid.size, float(offset)))


def autocovariance(params: OUParams, lag: float) -> float:
    """cov(dr(x), dr(x + lag)) = sigma exp(-gamma |lag|)."""
    return params.sigma * math.exp(-params.gamma * abs(lag))


def covariance_double_integral(params: OUParams, l: float) -> float:
    """Closed form of the double integral of the covariance over [0, l]^2:

        integral = (2 sigma / gamma) * (l - (1 - exp(-gamma l)) / gamma)

    Limits: sigma l^2 for gamma l << 1 (fully correlated) and
    2 sigma l / gamma for gamma l >> 1 (white-noise-like).
    """
    if not l > 0:
        raise ValueError(f"integration length must be positive, got {l}")
    g = params.gamma
    return (2.0 * params.sigma / g) * (l - (1.0 - math.exp(-g * l)) / g)
