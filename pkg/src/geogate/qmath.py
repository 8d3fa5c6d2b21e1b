"""Small dense complex linear algebra for one and two qubits.

States are plain ``numpy`` arrays of shape ``(2,)``; operators are ``(2, 2)``
or ``(4, 4)`` arrays.  Most helpers broadcast over leading axes so that a
batch of Monte Carlo gates can be handled as one ``(n, 2, 2)`` array.

Global phases are never normalised away.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

__all__ = [
    "I2",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "PAULI",
    "bloch_to_state",
    "state_to_density",
    "density_to_bloch",
    "bloch_to_density",
    "normalize",
    "tensor",
    "check_unitary",
    "dagger",
]

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

NORM_TOL = 1e-12


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(m, -1, -2))


def bloch_to_state(theta: float, phi: float) -> np.ndarray:
    """Return ``[cos(theta/2), exp(i phi) sin(theta/2)]``."""
    if not (np.isfinite(theta) and np.isfinite(phi)):
        raise DomainError(f"Bloch angles must be finite, got ({theta}, {phi})")
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], dtype=complex)


def normalize(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0 or not np.isfinite(norm):
        raise DomainError("cannot normalise a zero or non-finite state")
    return psi / norm


def _require_normalized(psi: np.ndarray) -> None:
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > NORM_TOL * 1e2:
        raise DomainError(f"state is not normalised (|psi|^2 = {norm2!r})")


def state_to_density(psi) -> np.ndarray:
    """Projector ``|psi><psi|`` for a normalised state."""
    psi = np.asarray(psi, dtype=complex)
    _require_normalized(psi)
    return np.outer(psi, psi.conj())


def density_to_bloch(rho) -> np.ndarray:
    """Bloch vector ``r_i = Tr(rho sigma_i)`` of a single-qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(rho @ s).real for s in PAULI])


def bloch_to_density(r) -> np.ndarray:
    """Linear-inversion map ``(I + r . sigma) / 2``; Hermitian and unit trace by construction."""
    rx, ry, rz = (float(v) for v in r)
    return 0.5 * (I2 + rx * SIGMA_X + ry * SIGMA_Y + rz * SIGMA_Z)


def tensor(a, b) -> np.ndarray:
    """Kronecker product; the first factor is the more significant qubit."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def check_unitary(m, tol: float = 1e-10) -> tuple[bool, float]:
    """Return ``(is_unitary, max |(M^dag M - I)_ij|)``.

    Broadcasts over leading axes; the deviation is the maximum over the batch.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise DomainError(f"expected square matrices, got shape {m.shape}")
    eye = np.eye(m.shape[-1])
    dev = float(np.max(np.abs(dagger(m) @ m - eye)))
    return dev <= tol, dev
