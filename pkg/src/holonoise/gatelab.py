"""Ideal and noise-perturbed two-loop Hadamard gates and their output states.

The ideal gate is the composition of the two loop holonomies,

    exp(-i sigma_x pi/2) . exp(-i sigma_y pi/4)  =  -i H0,
    H0 = [[1, 1], [1, -1]] / sqrt(2),

global phase included. Top-edge noise shifts the loop areas by alpha
and beta, giving exp(-i sigma_x (pi/2 + beta)) exp(-i sigma_y (pi/4 + alpha)).

For a basis input |j> the output projector has closed-form entries in
g = alpha - pi/4 and beta (derived by expanding the product):

    <j|rho|j>   = 1/2 + 1/2 cos(2g) cos(2beta)
    <nj|rho|nj> = 1/2 - 1/2 cos(2g) cos(2beta)
    <j|rho|nj>  = (i/2) sin(2beta) cos(2g) - (1/2)(-1)^j sin(2g)

``realization_density`` evaluates these directly (the cheap runtime
path); building the gate and conjugating is kept as the independent
cross-check used in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmath
from .loops import HadamardLoopPair, perturbed_alpha, perturbed_beta
from .ounoise import NoisePath


def ideal_hadamard() -> np.ndarray:
    """The noise-free gate, -i H0 (phase-exact)."""
    return su2_product(0.0, 0.0)


def perturbed_gate(alpha: float, beta: float) -> np.ndarray:
    """Gate with loop areas shifted to pi/4 + alpha and pi/2 + beta."""
    if not (np.isfinite(alpha) and np.isfinite(beta)):
        raise ValueError("area perturbations must be finite")
    return su2_product(alpha, beta)


def su2_product(alpha: float, beta: float) -> np.ndarray:
    return qmath.su2_exp((math.pi / 2 + beta, 0.0, 0.0)) @ qmath.su2_exp(
        (0.0, math.pi / 4 + alpha, 0.0)
    )


def realization_density(j: int, alpha: float, beta: float) -> np.ndarray:
    """Output projector for input |j>, from the closed-form entries above."""
    j = qmath.require_basis_label(j)
    g2 = 2.0 * (alpha - math.pi / 4)
    b2 = 2.0 * beta
    diag = 0.5 * math.cos(g2) * math.cos(b2)
    off = 0.5j * math.sin(b2) * math.cos(g2) - 0.5 * (-1.0) ** j * math.sin(g2)
    rho = np.empty((2, 2), dtype=complex)
    rho[j, j] = 0.5 + diag
    rho[1 - j, 1 - j] = 0.5 - diag
    rho[j, 1 - j] = off
    rho[1 - j, j] = off.conjugate()
    return rho


@dataclass(frozen=True)
class GateRealization:
    """One noise draw: area shifts, the gate, and both basis output states.

    gamma is the shifted first-loop angle alpha - pi/4; per_state holds
    the output projectors for inputs |0> and |1>.
    """

    alpha: float
    beta: float
    gamma: float
    gate: np.ndarray
    per_state: tuple[np.ndarray, np.ndarray]

    def density(self, j: int) -> np.ndarray:
        return self.per_state[qmath.require_basis_label(j)]


def realize(pair: HadamardLoopPair, noise_x: NoisePath, noise_y: NoisePath) -> GateRealization:
    """Assemble the perturbed gate and output states for one noise draw."""
    alpha = perturbed_alpha(pair.loop_I, noise_x)
    beta = perturbed_beta(pair.loop_II, noise_y)
    return GateRealization(
        alpha=alpha,
        beta=beta,
        gamma=alpha - math.pi / 4,
        gate=perturbed_gate(alpha, beta),
        per_state=(
            realization_density(0, alpha, beta),
            realization_density(1, alpha, beta),
        ),
    )
