"""Adiabatic geometric gates: the single-qubit U(gamma, xi, eta) family, the
dynamic-phase-free two-loop gate, and the sigma_y sigma_y controlled gate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError, SingularityError
from .fieldpath import DEFAULT_STEPS, POLE_EPS, cone_berry_phase
from .qmath import dagger, tensor

__all__ = [
    "GateParams",
    "TwoQubitParams",
    "CONTROL_BASIS",
    "single_qubit_gate",
    "eigenstates",
    "two_loop_params",
    "two_loop_gate",
    "state_prep_minus",
    "two_qubit_phase",
    "controlled_angles",
    "controlled_gate",
    "block_gate",
    "control_basis_change",
    "to_computational_basis",
]

# Ordering of the 4x4 controlled gate: control in the sigma_y eigenbasis.
CONTROL_BASIS = ("|+>_C|0>_T", "|+>_C|1>_T", "|->_C|0>_T", "|->_C|1>_T")


@dataclass(frozen=True)
class GateParams:
    gamma: float
    xi: float
    eta: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite([self.gamma, self.xi, self.eta])):
            raise DomainError("gate parameters must be finite")
        if not 0.0 <= self.xi <= np.pi:
            raise DomainError(f"xi must lie in [0, pi], got {self.xi}")

    def unitary(self) -> np.ndarray:
        return single_qubit_gate(self.gamma, self.xi, self.eta)


@dataclass(frozen=True)
class TwoQubitParams:
    """Target drive ``nu``, detuning ``delta_omega`` and coupling ``J`` (rad/ns)."""

    nu: float
    delta_omega: float
    J: float

    def __post_init__(self):
        if not all(np.isfinite([self.nu, self.delta_omega, self.J])):
            raise DomainError("two-qubit parameters must be finite")
        if self.nu < 0 or self.J < 0:
            raise DomainError("nu and J must be non-negative")


def single_qubit_gate(gamma, xi, eta=0.0) -> np.ndarray:
    """Gate with eigenvalues ``exp(+-i gamma)`` on the field eigenstates at angles ``(xi, eta)``.

    Arguments broadcast; the result has shape ``broadcast_shape + (2, 2)``.
    """
    gamma, xi, eta = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (gamma, xi, eta)))
    ep, em = np.exp(1j * gamma), np.exp(-1j * gamma)
    c2, s2 = np.cos(xi / 2) ** 2, np.sin(xi / 2) ** 2
    off = 1j * np.sin(xi) * np.sin(gamma)
    u = np.empty(gamma.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = ep * c2 + em * s2
    u[..., 0, 1] = np.exp(-1j * eta) * off
    u[..., 1, 0] = np.exp(1j * eta) * off
    u[..., 1, 1] = ep * s2 + em * c2
    return u


def eigenstates(xi, eta=0.0) -> tuple[np.ndarray, np.ndarray]:
    """Field-aligned and anti-aligned states ``|psi_+(0)>``, ``|psi_-(0)>``."""
    c, s, ph = np.cos(xi / 2), np.sin(xi / 2), np.exp(1j * eta)
    return np.array([c, ph * s], dtype=complex), np.array([-s, ph * c], dtype=complex)


def two_loop_params(nu, delta_omega, eta=0.0) -> GateParams:
    gamma = 2 * cone_berry_phase(nu, delta_omega)
    return GateParams(gamma, float(np.arctan2(nu, delta_omega)), float(eta))


def two_loop_gate(nu, delta_omega, eta=0.0) -> np.ndarray:
    """Pure geometric gate from a cone traversed twice with field reversal (gamma = 2 gamma_g)."""
    return two_loop_params(nu, delta_omega, eta).unitary()


def state_prep_minus() -> np.ndarray:
    """Prepare ``(|0> + i|1>)/sqrt(2)`` from ``|0>`` with xi = pi/2 and gamma_g = pi/8."""
    return single_qubit_gate(np.pi / 4, np.pi / 2, 0.0) @ np.array([1, 0], dtype=complex)


def two_qubit_phase(p: TwoQubitParams, branch: int = 1, n_steps: int = DEFAULT_STEPS,
                    delta_omega=None):
    """Geometric phase of the target over one shifted loop, integrated in the drive phase.

    ``branch=+1`` is the control-|+> loop (field shifted by -J/2 along y),
    ``branch=-1`` the control-|-> loop.  ``delta_omega`` may be an array to
    evaluate many detunings at once (used by the noisy gate); it overrides
    ``p.delta_omega``.
    """
    if branch not in (1, -1):
        raise DomainError("branch must be +1 or -1")
    n = int(n_steps)
    if n < 64 or n % 2:
        raise DomainError(f"n_steps must be an even integer >= 64, got {n_steps}")
    dw = np.asarray(p.delta_omega if delta_omega is None else delta_omega, dtype=float)
    phi = np.linspace(np.pi / 2, 5 * np.pi / 2, n + 1)
    a = p.nu * p.J
    b = p.nu**2 + dw[..., None] ** 2 + 0.25 * p.J**2
    s = branch * a * np.sin(phi)
    r = np.sqrt(np.maximum(b - s, 0.0))
    pole = r + dw[..., None]
    if np.any(r == 0) or np.any(pole < POLE_EPS * r):
        raise SingularityError("shifted field vanishes or reaches the south pole along the loop")
    integrand = (p.nu**2 - 0.5 * s) / (r * pole)
    out = 0.5 * simpson(integrand, dx=2 * np.pi / n, axis=-1)
    return float(out) if out.ndim == 0 else out


def controlled_angles(p: TwoQubitParams, delta_omega=None):
    """Mixing angles ``xi_+-`` = arctan((nu -+ J/2) / delta_omega) of the two blocks."""
    dw = np.asarray(p.delta_omega if delta_omega is None else delta_omega, dtype=float)
    if np.any(dw <= 0):
        raise DomainError("the controlled gate requires delta_omega > 0")
    return np.arctan((p.nu - p.J / 2) / dw), np.arctan((p.nu + p.J / 2) / dw)


def block_gate(gamma, xi_plus, xi_minus, eta=np.pi / 2) -> np.ndarray:
    """``diag(U(gamma, xi_+), U(gamma, xi_-))``; broadcasts over leading axes."""
    up = single_qubit_gate(gamma, xi_plus, eta)
    um = single_qubit_gate(gamma, xi_minus, eta)
    u = np.zeros(up.shape[:-2] + (4, 4), dtype=complex)
    u[..., :2, :2] = up
    u[..., 2:, 2:] = um
    return u


def controlled_gate(p: TwoQubitParams, n_steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Two-loop controlled geometric gate in the ``CONTROL_BASIS`` ordering.

    Both blocks share gamma = 2 gamma_g^+; only the mixing angle depends on the
    control state.  Corrections from the eigenstate angle varying along the
    shifted (non-conical) loop are not included.
    """
    xp, xm = controlled_angles(p)
    gamma = 2 * two_qubit_phase(p, 1, n_steps)
    return block_gate(gamma, xp, xm, np.pi / 2)


def control_basis_change() -> np.ndarray:
    """Unitary whose columns are ``CONTROL_BASIS`` written in the computational basis."""
    plus = np.array([1, 1j]) / np.sqrt(2)
    minus = np.array([1, -1j]) / np.sqrt(2)
    return tensor(np.column_stack([plus, minus]), np.eye(2))


def to_computational_basis(u) -> np.ndarray:
    """Rewrite a ``CONTROL_BASIS`` operator in the |c t> computational basis."""
    w = control_basis_change()
    return w @ np.asarray(u, dtype=complex) @ dagger(w)
