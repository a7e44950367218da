"""Exact 2x2 complex linear algebra for one-qubit gates and states.

Everything here is closed-form: the su(2) exponential, projector
conjugation, the linear fidelity tr(rho_ref rho) and the purity
tr(rho^2). No iterative solver or series truncation appears, so the
only tolerance in play is double-precision rounding (ATOL below).
"""

from __future__ import annotations

import numpy as np

# Structural tolerance for unitarity / Hermiticity / trace checks.
# Closed forms leave nothing but rounding error, so 1e-12 is generous.
ATOL = 1e-12

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


def pauli(axis: str) -> np.ndarray:
    """Return the Pauli matrix for ``axis`` in {"x", "y", "z"}."""
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}, expected one of x, y, z") from None


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def require_basis_label(j: int) -> int:
    """Validate a computational-basis label; returns it as a plain int."""
    if j not in (0, 1):
        raise ValueError(f"basis label must be 0 or 1, got {j!r}")
    return int(j)


def basis_projector(j: int) -> np.ndarray:
    """|j><j| for j in {0, 1}."""
    j = require_basis_label(j)
    p = np.zeros((2, 2), dtype=complex)
    p[j, j] = 1.0
    return p


def su2_exp(coeffs) -> np.ndarray:
    """exp(-i (cx sx + cy sy + cz sz)) via the closed form.

    With theta = |c| and n = c/theta:

        U = cos(theta) 1 - i sin(theta) (n . sigma)

    theta = 0 returns the identity without dividing. The result is
    special unitary (det U = 1) up to rounding.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (3,):
        raise ValueError(f"expected 3 real coefficients, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise ValueError("su(2) coefficients must be finite")
    theta = float(np.linalg.norm(c))
    h = c[0] * SIGMA_X + c[1] * SIGMA_Y + c[2] * SIGMA_Z
    # sin(theta)/theta == sinc(theta/pi); exact 1 at theta = 0
    return np.cos(theta) * IDENTITY - 1j * np.sinc(theta / np.pi) * h


def exp_anti_hermitian(m: np.ndarray) -> np.ndarray:
    """exp(M) for anti-Hermitian M, exactly, via Pauli decomposition.

    Writes M = -i (c0 1 + c . sigma) with real c0, c and returns
    exp(-i c0) * su2_exp(c). Raises if M is not anti-Hermitian within
    ATOL, which is what guarantees the result is unitary.
    """
    m = np.asarray(m, dtype=complex)
    if np.max(np.abs(m + dagger(m))) > ATOL:
        raise ValueError("matrix is not anti-Hermitian within tolerance")
    k = 1j * m  # Hermitian
    c0 = 0.5 * (k[0, 0].real + k[1, 1].real)
    cx = k[1, 0].real
    cy = k[1, 0].imag
    cz = 0.5 * (k[0, 0].real - k[1, 1].real)
    return np.exp(-1j * c0) * su2_exp((cx, cy, cz))


def is_unitary(u: np.ndarray, atol: float = ATOL) -> bool:
    u = np.asarray(u)
    return (
        u.shape == (2, 2)
        and bool(np.all(np.isfinite(u)))
        and float(np.max(np.abs(dagger(u) @ u - IDENTITY))) <= atol
    )


def require_unitary(u: np.ndarray, atol: float = ATOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, atol):
        raise ValueError("matrix is not unitary within tolerance")
    return u


def hermitian_eigenvalues(m: np.ndarray) -> tuple[float, float]:
    """Eigenvalues (low, high) of a 2x2 Hermitian matrix, closed form."""
    a = m[0, 0].real
    d = m[1, 1].real
    mid = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), abs(m[0, 1]))
    return mid - rad, mid + rad


def require_density(rho: np.ndarray, atol: float = ATOL) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity of a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2) or not np.all(np.isfinite(rho)):
        raise ValueError("density matrix must be a finite 2x2 complex matrix")
    if np.max(np.abs(rho - dagger(rho))) > atol:
        raise ValueError("density matrix is not Hermitian within tolerance")
    if abs(np.trace(rho) - 1.0) > atol:
        raise ValueError("density matrix trace differs from 1 beyond tolerance")
    lo, _ = hermitian_eigenvalues(rho)
    if lo < -atol:
        raise ValueError("density matrix has a negative eigenvalue beyond tolerance")
    return rho


def conjugate_state(g: np.ndarray, j: int) -> np.ndarray:
    """g |j><j| g^dag: the pure state obtained by acting with gate g on |j>."""
    g = require_unitary(g)
    col = g[:, require_basis_label(j)]
    return np.outer(col, col.conj())


def fidelity(reference: np.ndarray, state: np.ndarray) -> float:
    """Linear fidelity tr(reference . state) between density matrices.

    This is the overlap form used throughout: it equals |<psi|phi>|^2
    when both states are pure. Symmetric and linear in each argument.
    """
    reference = require_density(reference)
    state = require_density(state)
    val = np.trace(reference @ state)
    if abs(val.imag) > ATOL:
        raise ValueError("fidelity came out non-real; inputs are malformed")
    return float(val.real)


def purity(state: np.ndarray) -> float:
    """tr(rho^2); 1 for pure states, 1/2 at the maximally mixed floor."""
    state = require_density(state)
    val = np.trace(state @ state)
    return float(val.real)
