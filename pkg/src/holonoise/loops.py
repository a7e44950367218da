"""Rectangular control loops and their geometric area integrals.

The gate is driven by two rectangular loops, one in the (x, r1) control
plane and one in (y, r1), both with one side on the r1 = 0 axis. The
weighted areas enclosed are

    XPlane:  Sigma = integral of 2 exp(-2 r1)  =  l (1 - exp(-2 d))
    YPlane:  Sigma = integral of 2 exp(+2 r1)  =  l (exp(2 d) - 1)

with l the transverse side length and d the r1 height. solve_dx /
solve_dy invert these for the target areas pi/4 and pi/2. Squeezing
control noise perturbs the top edge, r1 = d + dr(.), and shifts the
areas by the quadrature integrals ``perturbed_alpha`` / ``perturbed_beta``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .ounoise import NoisePath

AREA_TOL = 1e-12

# Heights diverge as l_x -> pi/4 from above; refuse configs too close.
MIN_LX_MARGIN = 1e-6
MIN_LX = math.pi / 4 + MIN_LX_MARGIN


class Plane(enum.Enum):
    """Which control plane a loop lives in."""

    X = "x"
    Y = "y"


@dataclass(frozen=True)
class ControlPoint:
    """A point in the control manifold (displacement x + iy, squeezing r1 e^{i theta1})."""

    x: float = 0.0
    y: float = 0.0
    r1: float = 0.0
    theta1: float = 0.0

    def __post_init__(self):
        if self.r1 < 0:
            raise ValueError("squeezing magnitude r1 must be >= 0")
        if self.theta1 != 0.0:
            raise ValueError("only theta1 = 0 loops are supported")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.r1, self.theta1], dtype=float)


@dataclass(frozen=True)
class RectLoop:
    """Axis-parallel rectangle with its bottom side on r1 = 0.

    ``a`` and ``b`` bound the transverse coordinate (x or y depending on
    ``plane``), ``d`` is the r1 height. ``orientation`` +1 traverses
    counterclockwise starting from (a, 0), -1 reverses the loop.
    """

    plane: Plane
    a: float
    b: float
    d: float
    orientation: int = +1

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b) and np.isfinite(self.d)):
            raise ValueError("loop coordinates must be finite")
        if self.b <= self.a:
            raise ValueError(f"need b > a, got a={self.a}, b={self.b}")
        if self.d <= 0:
            raise ValueError(f"loop height d must be positive, got {self.d}")
        if self.orientation not in (+1, -1):
            raise ValueError("orientation must be +1 or -1")

    @property
    def length(self) -> float:
        return self.b - self.a


def solve_dx(l_x: float) -> float:
    """Height of the x-plane rectangle whose weighted area is exactly pi/4.

        d_x = -1/2 ln(1 - pi / (4 l_x)),   valid only for l_x > pi/4.

    Below l_x = pi/4 no finite height encloses area pi/4 (the weight
    2 exp(-2 r1) integrates to at most l_x over an infinite strip).
    """
    if not l_x > math.pi / 4:
        raise ValueError(
            f"l_x must exceed pi/4 ~ {math.pi / 4:.6f} for the x-plane loop to "
            f"enclose area pi/4; got l_x = {l_x}"
        )
    return -0.5 * math.log(1.0 - math.pi / (4.0 * l_x))


def solve_dy(l_y: float) -> float:
    """Height of the y-plane rectangle whose weighted area is exactly pi/2.

        d_y = 1/2 ln(1 + pi / (2 l_y)),   for any l_y > 0.
    """
    if not l_y > 0:
        raise ValueError(f"l_y must be positive, got {l_y}")
    return 0.5 * math.log(1.0 + math.pi / (2.0 * l_y))


def area_sigma(loop: RectLoop) -> float:
    """Weighted area enclosed by ``loop`` (closed form, see module docstring)."""
    if loop.plane is Plane.X:
        return loop.length * (1.0 - math.exp(-2.0 * loop.d))
    return loop.length * (math.exp(2.0 * loop.d) - 1.0)


@dataclass(frozen=True)
class HadamardLoopPair:
    """The calibrated loop pair: areas pi/4 (x-plane) and pi/2 (y-plane)."""

    loop_I: RectLoop
    loop_II: RectLoop

    def __post_init__(self):
        if self.loop_I.plane is not Plane.X or self.loop_II.plane is not Plane.Y:
            raise ValueError("loop_I must lie in the x-plane and loop_II in the y-plane")
        if abs(area_sigma(self.loop_I) - math.pi / 4) > AREA_TOL:
            raise ValueError("loop_I area differs from pi/4 beyond tolerance")
        if abs(area_sigma(self.loop_II) - math.pi / 2) > AREA_TOL:
            raise ValueError("loop_II area differs from pi/2 beyond tolerance")


def hadamard_loop_pair(l_x: float, l_y: float) -> HadamardLoopPair:
    """Build the calibrated pair with both loops starting at transverse 0."""
    if l_x < MIN_LX:
        raise ValueError(
            f"l_x must be at least pi/4 + {MIN_LX_MARGIN} to keep the solved "
            f"height finite; got {l_x}"
        )
    return HadamardLoopPair(
        loop_I=RectLoop(Plane.X, 0.0, l_x, solve_dx(l_x)),
        loop_II=RectLoop(Plane.Y, 0.0, l_y, solve_dy(l_y)),
    )


def _require_spanning(noise: NoisePath, loop: RectLoop) -> None:
    if abs(noise.grid[0] - loop.a) > 1e-9 or abs(noise.grid[-1] - loop.b) > 1e-9:
        raise ValueError(
            f"noise grid [{noise.grid[0]}, {noise.grid[-1]}] does not span the "
            f"loop extent [{loop.a}, {loop.b}]"
        )


def perturbed_alpha(loop_I: RectLoop, noise: NoisePath) -> float:
    """Area shift of the x-plane loop from top-edge noise dr(x):

        alpha = exp(-2 d_x) * integral over [a, b] of (1 - exp(-2 dr(x))) dx

    evaluated by the trapezoid rule on the noise grid (the path is only
    known at the sample points). Equals the exact area deviation when
    dr is constant. Increasing dr pointwise increases alpha.
    """
    if loop_I.plane is not Plane.X:
        raise ValueError("perturbed_alpha applies to x-plane loops")
    _require_spanning(noise, loop_I)
    integrand = 1.0 - np.exp(-2.0 * noise.values)
    return float(math.exp(-2.0 * loop_I.d) * np.trapezoid(integrand, dx=noise.spacing))


def perturbed_beta(loop_II: RectLoop, noise: NoisePath) -> float:
    """Area shift of the y-plane loop, same convention as perturbed_alpha:

        beta = exp(+2 d_y) * integral over [a, b] of (exp(2 dr(y)) - 1) dy
    """
    if loop_II.plane is not Plane.Y:
        raise ValueError("perturbed_beta applies to y-plane loops")
    _require_spanning(noise, loop_II)
    integrand = np.exp(2.0 * noise.values) - 1.0
    return float(math.exp(2.0 * loop_II.d) * np.trapezoid(integrand, dx=noise.spacing))
