"""Quasi-static Gaussian parameter noise and the effective noisy gates it induces.

Noise enters only through the control parameters: each shot draws perturbed
``(nu, delta_omega)`` once, holds them through both loops, and the resulting
gate is the ideal gate evaluated at the perturbed parameters.  Noisy gates
are therefore exactly unitary.

Random streams are numpy ``PCG64`` generators seeded from
``SeedSequence(seed, spawn_key=key)``; a given ``(seed, key)`` always yields
the same draws regardless of which process consumes them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import k as K_BOLTZMANN

from .errors import DomainError
from .fieldpath import DEFAULT_STEPS, cone_berry_phase
from .gates import TwoQubitParams, block_gate, controlled_angles, single_qubit_gate, two_qubit_phase

__all__ = [
    "RNG_ALGORITHM",
    "NoiseSpec",
    "NoisySample",
    "make_rng",
    "gaussian_perturb",
    "draw_single",
    "noisy_single_gate",
    "draw_detuning",
    "noisy_controlled_gate",
    "thermal_noise_current",
]

RNG_ALGORITHM = "numpy.PCG64/SeedSequence"
MAX_RESAMPLE = 100
_QUAD_CHUNK = 1024


@dataclass(frozen=True)
class NoiseSpec:
    """Standard deviations of the detuning (``sigma0``) and drive (``sigma1``) noise.

    With ``relative=True`` (the default) the sigmas are fractions of the
    nominal value; otherwise they are absolute, in rad/ns.
    """

    sigma0: float = 0.0
    sigma1: float = 0.0
    seed: int = 0
    relative: bool = True

    def __post_init__(self):
        if not (np.isfinite(self.sigma0) and np.isfinite(self.sigma1)):
            raise DomainError("noise sigmas must be finite")
        if self.sigma0 < 0 or self.sigma1 < 0:
            raise DomainError("noise sigmas must be non-negative")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must fit in an unsigned 64-bit integer")

    def scale(self, nominal, sigma):
        return sigma * abs(nominal) if self.relative else sigma


@dataclass(frozen=True)
class NoisySample:
    """Perturbed parameters of a batch of shots (arrays of equal shape)."""

    nu: np.ndarray
    delta_omega: np.ndarray
    gamma: np.ndarray
    xi: np.ndarray

    def gates(self, eta=0.0) -> np.ndarray:
        return single_qubit_gate(self.gamma, self.xi, eta)


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for stream ``key`` under ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def gaussian_perturb(nominal, sigma_rel, rng: np.random.Generator, size=None):
    """``nominal + x`` with ``x ~ N(0, (sigma_rel * nominal)^2)``.

    One standard normal is always consumed per output value, so streams stay
    aligned whether or not the sigma is zero.
    """
    if sigma_rel < 0:
        raise DomainError("sigma must be non-negative")
    z = rng.standard_normal(size)
    return nominal + sigma_rel * abs(nominal) * z


def draw_single(nu, delta_omega, spec: NoiseSpec, rng: np.random.Generator, size=None) -> NoisySample:
    """Draw perturbed single-qubit parameters.

    Each shot consumes two standard normals, detuning first.  Draws with a
    vanishing field (probability zero in exact arithmetic) are redrawn.
    """
    shape = () if size is None else (size,) if np.isscalar(size) else tuple(size)
    n = int(np.prod(shape))
    dw_scale = spec.scale(delta_omega, spec.sigma0)
    nu_scale = spec.scale(nu, spec.sigma1)
    z = rng.standard_normal((2, n))
    dw = delta_omega + dw_scale * z[0]
    nv = nu + nu_scale * z[1]
    for _ in range(MAX_RESAMPLE):
        bad = (dw == 0) & (nv == 0)
        if not bad.any():
            break
        z = rng.standard_normal((2, int(bad.sum())))
        dw[bad] = delta_omega + dw_scale * z[0]
        nv[bad] = nu + nu_scale * z[1]
    else:
        raise DomainError("could not draw a non-degenerate field")
    dw, nv = dw.reshape(shape), nv.reshape(shape)
    gamma = 2 * cone_berry_phase(nv, dw)
    xi = np.arctan2(nv, dw)
    return NoisySample(nv, dw, gamma, xi)


def noisy_single_gate(nu, delta_omega, eta, spec: NoiseSpec, rng: np.random.Generator,
                      size=None) -> np.ndarray:
    """Two-loop gate at randomly perturbed ``(nu, delta_omega)``; eta is held fixed."""
    return draw_single(nu, delta_omega, spec, rng, size).gates(eta)


def draw_detuning(delta_omega, spec: NoiseSpec, rng: np.random.Generator, size=None):
    """Perturbed detunings, redrawing any that are not strictly positive."""
    dw = np.atleast_1d(delta_omega + spec.scale(delta_omega, spec.sigma0)
                       * rng.standard_normal(size)).astype(float)
    for _ in range(MAX_RESAMPLE):
        bad = dw <= 0
        if not np.any(bad):
            break
        dw[bad] = delta_omega + spec.scale(delta_omega, spec.sigma0) * rng.standard_normal(
            int(np.count_nonzero(bad)))
    else:
        raise DomainError("could not draw a positive detuning")
    return dw if size is not None else float(dw[0])


def noisy_controlled_gate(p: TwoQubitParams, spec: NoiseSpec, rng: np.random.Generator,
                          size=None, n_steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Controlled gate under detuning noise only.

    The shared geometric angle is re-integrated at every drawn detuning.
    """
    if spec.sigma1 != 0:
        raise DomainError("the two-qubit noise model only perturbs delta_omega (sigma1 must be 0)")
    dw = np.atleast_1d(draw_detuning(p.delta_omega, spec, rng, size))
    gamma = np.concatenate([
        2 * np.atleast_1d(two_qubit_phase(p, 1, n_steps, delta_omega=dw[i:i + _QUAD_CHUNK]))
        for i in range(0, dw.size, _QUAD_CHUNK)
    ])
    xp, xm = controlled_angles(p, dw)
    u = block_gate(gamma, xp, xm, np.pi / 2)
    return u if size is not None else u[0]


def thermal_noise_current(temperature, resistance, bandwidth) -> float:
    """Johnson current noise ``sqrt(4 k_B T B / R)`` in amperes (rms)."""
    if min(temperature, resistance, bandwidth) <= 0:
        raise DomainError("temperature, resistance and bandwidth must be positive")
    return float(np.sqrt(4 * K_BOLTZMANN * temperature * bandwidth / resistance))
