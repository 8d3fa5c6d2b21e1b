"""Current-biased Josephson junction (phase qubit) parameters and their mapping
onto the control fields used by the gate model.

SI units in and out, except where a name says otherwise.  The gate model
works in rad/ns; ``ghz_to_rad_per_ns`` and friends convert cyclic
frequencies the way they are usually quoted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import e as E_CHARGE, h as PLANCK, hbar as HBAR

from .errors import DomainError, SingularityError

__all__ = [
    "FLUX_QUANTUM",
    "JunctionSpec",
    "Preset",
    "PRESETS",
    "get_preset",
    "ghz_to_rad_per_ns",
    "rad_per_ns_to_ghz",
    "josephson_inductance",
    "barrier_height",
    "plasma_frequency",
    "control_fields",
    "coupling_strength",
    "ramsey_fractional_noise",
]

FLUX_QUANTUM = PLANCK / (2 * E_CHARGE)


def ghz_to_rad_per_ns(f_ghz):
    return 2 * np.pi * f_ghz


def rad_per_ns_to_ghz(w):
    return w / (2 * np.pi)


@dataclass(frozen=True)
class JunctionSpec:
    """Junction and bias settings.

    ``slope`` is dE10/dI_dc expressed as (rad/ns) per ampere; ``omega10`` is in
    rad/ns.  ``di_dc`` is the bias-current excursion that sets the detuning.
    """

    i_c: float
    capacitance: float
    i_dc: float = 0.0
    i_mw: float = 0.0
    di_dc: float = 0.0
    slope: float = 0.0
    c_x: float = 0.0
    omega10: float = 2 * np.pi * 6.0

    def __post_init__(self):
        if self.i_c <= 0 or self.capacitance <= 0:
            raise DomainError("critical current and capacitance must be positive")
        if abs(self.i_dc) >= self.i_c:
            raise DomainError("|I_dc| must stay below the critical current")
        if self.omega10 <= 0:
            raise DomainError("omega10 must be positive")


def josephson_inductance(i_c, delta) -> float:
    """``phi0 / (2 pi I_c cos(delta))`` in henry."""
    if i_c <= 0:
        raise DomainError("critical current must be positive")
    c = np.cos(delta)
    if abs(c) < 1e-12:
        raise SingularityError("Josephson inductance diverges at delta = +-pi/2")
    return float(FLUX_QUANTUM / (2 * np.pi * i_c * c))


def barrier_height(i, i_c) -> float:
    """Cubic-approximation barrier ``(2 sqrt2 I_c phi0 / 3 pi) (1 - I/I_c)^(3/2)`` in joule."""
    if i_c <= 0:
        raise DomainError("critical current must be positive")
    if i < 0 or i > i_c:
        raise DomainError(f"bias current must lie in [0, I_c], got {i}")
    return float(2 * np.sqrt(2) * i_c * FLUX_QUANTUM / (3 * np.pi) * (1 - i / i_c) ** 1.5)


def plasma_frequency(i, i_c, capacitance) -> float:
    """Small-oscillation frequency at the well bottom, in rad/s.

    ``2^(1/4) sqrt(2 pi I_c / (phi0 C)) (1 - I/I_c)^(1/4)``
    """
    if i_c <= 0 or capacitance <= 0:
        raise DomainError("critical current and capacitance must be positive")
    if i < 0 or i >= i_c:
        raise DomainError(f"bias current must lie in [0, I_c), got {i}")
    return float(2**0.25 * np.sqrt(2 * np.pi * i_c / (FLUX_QUANTUM * capacitance)) * (1 - i / i_c) ** 0.25)


def control_fields(spec: JunctionSpec) -> tuple[float, float]:
    """``(nu, delta_omega)`` in rad/ns.

    nu = I_mw sqrt(hbar / (2 omega10 C)) / hbar, delta_omega = dI_dc * slope.
    """
    omega10_si = spec.omega10 * 1e9
    nu_si = spec.i_mw * np.sqrt(HBAR / (2 * omega10_si * spec.capacitance)) / HBAR
    return float(nu_si * 1e-9), float(spec.di_dc * spec.slope)


def coupling_strength(c_x, c_j, omega01) -> float:
    """Capacitive sigma_y sigma_y coupling ``J = (C_x / C_J) omega01`` (same units as omega01)."""
    if c_x < 0 or c_j <= 0:
        raise DomainError("capacitances must be positive")
    return float(c_x / c_j * omega01)


def ramsey_fractional_noise(noise_current, slope, delta_omega) -> float:
    """Fractional detuning spread produced by an rms bias-current noise."""
    if delta_omega == 0:
        raise DomainError("nominal detuning must be non-zero")
    return float(abs(noise_current * slope / delta_omega))


@dataclass(frozen=True)
class Preset:
    """A named working point.  Frequencies are cyclic, in GHz."""

    name: str
    nu_ghz: float
    delta_omega_ghz: float
    J_ghz: float
    omega10_ghz: float
    i_c: float
    c_j: float
    c_x: float
    temperature: float
    resistance: float
    bandwidth: float
    tau0_ns: float

    @property
    def nu(self) -> float:
        return ghz_to_rad_per_ns(self.nu_ghz)

    @property
    def delta_omega(self) -> float:
        return ghz_to_rad_per_ns(self.delta_omega_ghz)

    @property
    def J(self) -> float:
        return ghz_to_rad_per_ns(self.J_ghz)

    @property
    def omega10(self) -> float:
        return ghz_to_rad_per_ns(self.omega10_ghz)


PRESETS = {
    "paper-2007": Preset(
        name="paper-2007",
        nu_ghz=0.3,
        delta_omega_ghz=0.3,
        J_ghz=0.15,
        omega10_ghz=6.0,
        i_c=10e-6,
        c_j=1.3e-12,
        c_x=33e-15,
        temperature=4.2,
        resistance=10e3,
        bandwidth=10e9,
        tau0_ns=400.0,
    ),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}") from None
