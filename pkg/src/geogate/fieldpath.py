"""Fictitious-field loops and their Berry phases.

A rotating-frame qubit driven with Rabi amplitude ``nu``, drive phase ``phi``
and detuning ``delta_omega`` sees the field

    B = (nu cos(phi), nu sin(phi) + y_offset, delta_omega)

with Hamiltonian ``H = sigma . B / 2`` (hbar = 1, frequencies in rad/ns).
Sweeping ``phi`` once around a full turn traces a (possibly y-shifted) cone.

Sign conventions
----------------
``solid_angle`` is the signed integral

    Omega = int (B_x dB_y/dt - B_y dB_x/dt) / (|B| (B_z + |B|)) dt

which is positive for counter-clockwise (phi increasing, ``direction=+1``)
traversal.  The eigenstate aligned with the field picks up the Berry phase
``-Omega / 2``.  Gates of the form ``U(gamma)`` with a *positive* geometric
angle ``gamma = cone_berry_phase(...)`` for the aligned state are therefore
produced by the clockwise loop, ``direction=GATE_DIRECTION``.  Choosing the
other direction flips every geometric phase coherently (``gamma -> -gamma``).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError, SingularityError

__all__ = [
    "GATE_DIRECTION",
    "POLE_EPS",
    "DEFAULT_STEPS",
    "FieldPath",
    "LoopSequence",
    "cone_path",
    "shifted_cone_path",
    "gate_loop",
    "two_loop",
    "solid_angle",
    "berry_phase",
    "cone_berry_phase",
    "eigen_angles",
]

GATE_DIRECTION = -1
POLE_EPS = 1e-9
DEFAULT_STEPS = 4096


@dataclass(frozen=True)
class FieldPath:
    """One closed period of a (y-shifted) conical field loop.

    ``reversed`` negates the whole field, which is how the second leg of the
    two-loop protocol is represented.
    """

    nu: float
    delta_omega: float
    tau0: float
    y_offset: float = 0.0
    phi_start: float = 0.0
    direction: int = 1
    reversed: bool = False

    def __post_init__(self):
        for name in ("nu", "delta_omega", "tau0", "y_offset", "phi_start"):
            if not np.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.nu < 0:
            raise DomainError(f"nu must be non-negative, got {self.nu}")
        if self.tau0 <= 0:
            raise DomainError(f"tau0 must be positive, got {self.tau0}")
        if self.direction not in (1, -1):
            raise DomainError(f"direction must be +1 or -1, got {self.direction}")

    @property
    def sign(self) -> float:
        return -1.0 if self.reversed else 1.0

    @property
    def angular_rate(self) -> float:
        """d(phi)/dt in rad/ns."""
        return self.direction * 2 * np.pi / self.tau0

    def drive_phase(self, t):
        return self.phi_start + self.angular_rate * np.asarray(t, dtype=float)

    def field(self, t) -> np.ndarray:
        """B(t) with shape ``t.shape + (3,)``."""
        phi = self.drive_phase(t)
        b = np.stack(
            [
                self.nu * np.cos(phi),
                self.nu * np.sin(phi) + self.y_offset,
                np.full_like(phi, self.delta_omega),
            ],
            axis=-1,
        )
        return self.sign * b

    def field_rate(self, t) -> np.ndarray:
        """dB/dt, analytically."""
        phi = self.drive_phase(t)
        w = self.angular_rate * self.nu
        db = np.stack([-w * np.sin(phi), w * np.cos(phi), np.zeros_like(phi)], axis=-1)
        return self.sign * db

    def closure_error(self) -> float:
        return float(np.max(np.abs(self.field(self.tau0) - self.field(0.0))))


@dataclass(frozen=True)
class LoopSequence:
    """Consecutive field segments played back to back."""

    segments: tuple[FieldPath, ...]

    def __post_init__(self):
        if not self.segments:
            raise DomainError("a loop sequence needs at least one segment")

    @property
    def duration(self) -> float:
        return float(sum(s.tau0 for s in self.segments))

    @property
    def boundaries(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum([s.tau0 for s in self.segments])])

    def field(self, t: float) -> np.ndarray:
        """Field at global time ``t``; at a boundary the later segment wins,
        so ``field(tau0)`` is the value just after the switch."""
        edges = self.boundaries
        if t < 0 or t > edges[-1]:
            raise DomainError(f"t={t} outside [0, {edges[-1]}]")
        k = min(int(np.searchsorted(edges, t, side="right")) - 1, len(self.segments) - 1)
        return self.segments[k].field(t - edges[k])


def cone_path(nu, delta_omega, eta, tau0, direction: int = 1) -> FieldPath:
    """Cone loop starting at drive phase ``eta``."""
    return FieldPath(float(nu), float(delta_omega), float(tau0), phi_start=float(eta),
                     direction=direction)


def shifted_cone_path(nu, delta_omega, y_offset, tau0, phi_start=np.pi / 2,
                      direction: int = 1) -> FieldPath:
    """Cone displaced along y, as seen by a target qubit whose drive is shifted by
    the sigma_y sigma_y coupling (``y_offset = -J/2`` for control |+>, ``+J/2`` for |->)."""
    return FieldPath(float(nu), float(delta_omega), float(tau0), y_offset=float(y_offset),
                     phi_start=float(phi_start), direction=direction)


def two_loop(path: FieldPath) -> LoopSequence:
    """The path followed by its pointwise negation, ``B(tau0 + t) = -B(t)``."""
    if path.closure_error() > 1e-12 * max(1.0, path.nu, abs(path.delta_omega)):
        raise DomainError("path does not close")
    return LoopSequence((path, replace(path, reversed=not path.reversed)))


def gate_loop(nu, delta_omega, eta, tau0) -> LoopSequence:
    """Two-loop sequence realising ``two_loop_gate(nu, delta_omega, eta)``."""
    return two_loop(cone_path(nu, delta_omega, eta, tau0, direction=GATE_DIRECTION))


def _check_steps(n_steps: int) -> int:
    n = int(n_steps)
    if n < 64 or n % 2:
        raise DomainError(f"n_steps must be an even integer >= 64, got {n_steps}")
    return n


def solid_angle(path: FieldPath, n_steps: int = DEFAULT_STEPS) -> float:
    """Signed solid angle swept by ``path`` (composite Simpson over one period)."""
    n = _check_steps(n_steps)
    t = np.linspace(0.0, path.tau0, n + 1)
    b = path.field(t)
    db = path.field_rate(t)
    norm = np.linalg.norm(b, axis=-1)
    denom_pole = b[:, 2] + norm
    if np.any(norm == 0) or np.any(denom_pole < POLE_EPS * norm):
        raise SingularityError(
            "field passes through the south pole (B_z + |B| ~ 0); "
            "the solid-angle integrand is singular there"
        )
    integrand = (b[:, 0] * db[:, 1] - b[:, 1] * db[:, 0]) / (norm * denom_pole)
    return float(simpson(integrand, dx=path.tau0 / n))


def berry_phase(path: FieldPath, branch: int = 1, n_steps: int = DEFAULT_STEPS) -> float:
    """Berry phase of the eigenstate aligned (``branch=+1``) or anti-aligned
    (``branch=-1``) with the path's own field."""
    if branch not in (1, -1):
        raise DomainError("branch must be +1 or -1")
    return -branch * solid_angle(path, n_steps) / 2


def cone_berry_phase(nu, delta_omega):
    """Closed form ``pi (1 - dw / sqrt(dw^2 + nu^2))`` for a full cone (|psi_+> branch).

    Accepts arrays; scalars in give a float out.
    """
    nu = np.asarray(nu, dtype=float)
    delta_omega = np.asarray(delta_omega, dtype=float)
    norm = np.hypot(nu, delta_omega)
    if np.any(norm == 0):
        raise DomainError("cone Berry phase undefined for a vanishing field")
    out = np.pi * (1 - delta_omega / norm)
    return float(out) if out.ndim == 0 else out


def eigen_angles(b0) -> tuple[float, float]:
    """Polar and azimuthal angles ``(xi, eta)`` of a field vector (or of a path at t=0).

    ``eta`` is 0 when B_x = B_y = 0.
    """
    if isinstance(b0, FieldPath):
        b0 = b0.field(0.0)
    bx, by, bz = (float(v) for v in np.asarray(b0, dtype=float))
    rho = np.hypot(bx, by)
    if rho == 0 and bz == 0:
        raise DomainError("eigen angles undefined for a vanishing field")
    eta = float(np.arctan2(by, bx)) if rho > 0 else 0.0
    return float(np.arctan2(rho, bz)), eta
