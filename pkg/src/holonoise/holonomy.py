"""Path-ordered exponentials of a matrix connection over control-space paths.

A loop gamma in the control manifold produces the unitary

    Gamma(gamma) = Pexp( loop integral of A_mu dlambda_mu )

evaluated here as an ordered product of per-step factors
exp(A_mu(midpoint) dlambda_mu), later steps multiplying on the left.
Midpoint evaluation is exact wherever the connection is constant along
a step and second-order accurate elsewhere.

The shipped per-plane connections are effective fields constructed so
that the loop integral over a rectangle reproduces the weighted-area
law of the loops module:

    x-plane:  A_x(r1) = -i exp(-2 r1) sigma_y,  A_r1 = 0
    y-plane:  A_y(r1) = +i exp(+2 r1) sigma_x,  A_r1 = 0

Both are abelian within their plane (a single Pauli direction), so the
ordered product collapses to the exponential of the plain line integral;
that equivalence is validated by tests, not assumed here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import qmath
from .loops import ControlPoint, Plane, RectLoop
from .ounoise import NoisePath

# Control-manifold coordinate order used for path vertices and the
# direction index mu: (x, y, r1, theta1).
COORD_X, COORD_Y, COORD_R1, COORD_THETA1 = range(4)
N_COORDS = 4

ANTIHERM_TOL = 1e-12
HOLONOMY_UNITARITY_TOL = 1e-10

_ZERO = np.zeros((2, 2), dtype=complex)


@dataclass(frozen=True)
class ConnectionField:
    """Matrix-valued connection: component(point, mu) -> anti-Hermitian 2x2.

    ``point`` is a length-4 coordinate array, ``mu`` a direction index.
    Anti-Hermiticity of every evaluated component is enforced by the
    integrator; it is what makes every holonomy unitary.
    """

    component: Callable[[np.ndarray, int], np.ndarray]


def effective_connection(plane: Plane) -> ConnectionField:
    """The per-plane field reproducing the rectangle area law (see module doc)."""
    if plane is Plane.X:

        def comp(point: np.ndarray, mu: int) -> np.ndarray:
            if mu == COORD_X:
                return -1j * np.exp(-2.0 * point[COORD_R1]) * qmath.SIGMA_Y
            return _ZERO

    else:

        def comp(point: np.ndarray, mu: int) -> np.ndarray:
            if mu == COORD_Y:
                return 1j * np.exp(2.0 * point[COORD_R1]) * qmath.SIGMA_X
            return _ZERO

    return ConnectionField(component=comp)


def as_path(points) -> np.ndarray:
    """Normalize a path to an (n, 4) float vertex array."""
    if isinstance(points, np.ndarray):
        path = np.asarray(points, dtype=float)
    else:
        path = np.array(
            [p.as_array() if isinstance(p, ControlPoint) else np.asarray(p, dtype=float)
             for p in points]
        )
    if path.ndim != 2 or path.shape[1] != N_COORDS or path.shape[0] < 2:
        raise ValueError("a path needs at least 2 vertices of 4 coordinates each")
    if not np.all(np.isfinite(path)):
        raise ValueError("path vertices must be finite")
    return path


def path_ordered_exp(field: ConnectionField, path, steps_per_segment: int = 1) -> np.ndarray:
    """Ordered product of midpoint step factors along a polyline path.

    Each straight segment is cut into ``steps_per_segment`` equal steps;
    each step contributes exp(sum_mu A_mu(midpoint) dlambda_mu) applied
    on the left of the accumulated product. The result is unitary (each
    factor is the exponential of an anti-Hermitian matrix).
    """
    if steps_per_segment < 1:
        raise ValueError("steps_per_segment must be >= 1")
    vertices = as_path(path)
    u = np.eye(2, dtype=complex)
    for v0, v1 in zip(vertices[:-1], vertices[1:]):
        delta = (v1 - v0) / steps_per_segment
        if not np.any(delta):
            continue
        for s in range(steps_per_segment):
            mid = v0 + (s + 0.5) * delta
            m = np.zeros((2, 2), dtype=complex)
            for mu in range(N_COORDS):
                if delta[mu] == 0.0:
                    continue
                a_mu = field.component(mid, mu)
                if np.max(np.abs(a_mu + a_mu.conj().T)) > ANTIHERM_TOL:
                    raise ValueError(
                        f"connection component mu={mu} is not anti-Hermitian"
                    )
                m += a_mu * delta[mu]
            u = qmath.exp_anti_hermitian(m) @ u
    return qmath.require_unitary(u, HOLONOMY_UNITARITY_TOL)


def _transverse_axis(plane: Plane) -> int:
    return COORD_X if plane is Plane.X else COORD_Y


def rect_path(loop: RectLoop) -> np.ndarray:
    """Vertex path of the ideal rectangle, counterclockwise from (a, 0)."""
    t = _transverse_axis(loop.plane)
    corners_2d = [
        (loop.a, 0.0),
        (loop.b, 0.0),
        (loop.b, loop.d),
        (loop.a, loop.d),
        (loop.a, 0.0),
    ]
    path = np.zeros((len(corners_2d), N_COORDS))
    for i, (trans, r1) in enumerate(corners_2d):
        path[i, t] = trans
        path[i, COORD_R1] = r1
    return path if loop.orientation > 0 else path[::-1].copy()


def noisy_rect_path(loop: RectLoop, noise: NoisePath) -> np.ndarray:
    """Rectangle path whose top edge follows r1 = d + dr(.) on the noise grid.

    The sampled top edge is discretized as a staircase with the vertical
    jumps at the cell midpoints, so each grid height h_k rules a run of
    length equal to its trapezoid weight. The line integral of the
    per-plane connection along this path therefore equals the trapezoid
    quadrature of the sampled integrand exactly, making the holonomy
    agree with the perturbed-area route independently of noise size.
    """
    grid = noise.grid
    if abs(grid[0] - loop.a) > 1e-9 or abs(grid[-1] - loop.b) > 1e-9:
        raise ValueError(
            f"noise grid [{grid[0]}, {grid[-1]}] does not span the loop "
            f"extent [{loop.a}, {loop.b}]"
        )
    heights = loop.d + noise.values
    t = _transverse_axis(loop.plane)
    mids = 0.5 * (grid[:-1] + grid[1:])

    pts_2d = [(loop.a, 0.0), (loop.b, 0.0), (loop.b, heights[-1])]
    for k in range(len(grid) - 1, 0, -1):
        pts_2d.append((mids[k - 1], heights[k]))
        pts_2d.append((mids[k - 1], heights[k - 1]))
    pts_2d.append((loop.a, heights[0]))
    pts_2d.append((loop.a, 0.0))

    path = np.zeros((len(pts_2d), N_COORDS))
    for i, (trans, r1) in enumerate(pts_2d):
        path[i, t] = trans
        path[i, COORD_R1] = r1
    return path if loop.orientation > 0 else path[::-1].copy()


def noisy_rect_holonomy(loop: RectLoop, noise: NoisePath, steps_per_segment: int = 1) -> np.ndarray:
    """Holonomy of the noisy rectangle under the plane's effective connection."""
    field = effective_connection(loop.plane)
    return path_ordered_exp(field, noisy_rect_path(loop, noise), steps_per_segment)
