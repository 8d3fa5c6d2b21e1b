"""Reading out the geometric phase by single-qubit state tomography.

Measurement model: each axis is read by a pre-rotation followed by a
projective measurement of the excited state |1>:

* z: no rotation;
* x: rotation by -pi/2 about y, which maps r_x onto r_z;
* y: rotation by +pi/2 about x, which maps r_y onto r_z.

With this convention every excited-state probability is ``(1 - r_k) / 2``.
Reconstruction is plain linear inversion ``(I + r . sigma) / 2``; slightly
negative eigenvalues from finite statistics are reported, not repaired.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, UnobservablePhaseError
from .qmath import SIGMA_X, SIGMA_Y, bloch_to_density, state_to_density

__all__ = [
    "PRE_ROTATIONS",
    "TomographyRun",
    "ideal_initial_state",
    "ideal_final_state",
    "measurement_probs",
    "reconstruct",
    "sample_and_reconstruct",
    "extract_berry_phase",
    "run_tomography",
]

PRE_ROTATIONS = {
    "x": expm(-0.5j * (-np.pi / 2) * SIGMA_Y),
    "y": expm(-0.5j * (np.pi / 2) * SIGMA_X),
    "z": np.eye(2, dtype=complex),
}
COHERENCE_FLOOR = 1e-9


def ideal_initial_state(theta) -> np.ndarray:
    """``[cos(theta/2), sin(theta/2)]`` in the ``[|psi_+>, |psi_->]`` basis."""
    return np.array([np.cos(theta / 2), np.sin(theta / 2)], dtype=complex)


def ideal_final_state(theta, gamma_g) -> np.ndarray:
    """State after the two-loop protocol: the eigencomponents pick up ``exp(+-2i gamma_g)``."""
    return np.array([np.exp(2j * gamma_g) * np.cos(theta / 2),
                     np.exp(-2j * gamma_g) * np.sin(theta / 2)], dtype=complex)


def measurement_probs(rho) -> np.ndarray:
    """Excited-state probabilities ``(p_x, p_y, p_z)`` after the three pre-rotations."""
    rho = np.asarray(rho, dtype=complex)
    out = []
    for axis in "xyz":
        r = PRE_ROTATIONS[axis]
        out.append((r @ rho @ r.conj().T)[1, 1].real)
    return np.clip(np.array(out), 0.0, 1.0)


def reconstruct(probs) -> np.ndarray:
    """Linear inversion from excited-state probabilities."""
    return bloch_to_density(1.0 - 2.0 * np.asarray(probs, dtype=float))


def sample_and_reconstruct(rho_true, shots: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Binomially sample each axis with ``shots`` repetitions and invert.

    ``shots=0`` is the infinite-statistics limit and returns the exact state.
    """
    if shots < 0:
        raise DomainError("shots must be >= 0 (0 means analytic)")
    p = measurement_probs(rho_true)
    if shots == 0:
        return reconstruct(p)
    if rng is None:
        raise DomainError("finite-shot tomography needs a random generator")
    return reconstruct(rng.binomial(int(shots), p) / shots)


def extract_berry_phase(rho_initial, rho_final) -> float:
    """Relative coherence phase ``arg rho_f[0,1] - arg rho_i[0,1]``, wrapped to (-pi, pi].

    For the two-loop protocol this equals ``4 gamma_g`` (mod 2 pi).
    """
    ci = np.asarray(rho_initial)[0, 1]
    cf = np.asarray(rho_final)[0, 1]
    if abs(ci) < COHERENCE_FLOOR or abs(cf) < COHERENCE_FLOOR:
        raise UnobservablePhaseError("coherence vanishes (state at a pole); the phase is unobservable")
    d = np.angle(cf) - np.angle(ci)
    d = np.mod(d + np.pi, 2 * np.pi) - np.pi
    return float(np.pi if d == -np.pi else d)


@dataclass(frozen=True)
class TomographyRun:
    theta: float
    gamma_g: float
    shots: int
    rho_initial: np.ndarray
    rho_final: np.ndarray
    phase: float

    @property
    def min_eigenvalue(self) -> float:
        return float(min(np.linalg.eigvalsh(self.rho_initial).min(),
                         np.linalg.eigvalsh(self.rho_final).min()))


def run_tomography(theta, gamma_g, shots: int = 10_000,
                   rng: np.random.Generator | None = None) -> TomographyRun:
    """Prepare, evolve (ideally), measure both states and extract the relative phase."""
    rho_i = sample_and_reconstruct(state_to_density(ideal_initial_state(theta)), shots, rng)
    rho_f = sample_and_reconstruct(state_to_density(ideal_final_state(theta, gamma_g)), shots, rng)
    return TomographyRun(float(theta), float(gamma_g), int(shots), rho_i, rho_f,
                         extract_berry_phase(rho_i, rho_f))
