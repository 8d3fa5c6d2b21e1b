"""Monte Carlo average fidelity of noisy geometric gates over explicit input grids.

The average fidelity of an input state is the mean, over quasi-static noise
draws, of ``|<psi| U^dag U_noise |psi>|^2``.  Sweeps draw one batch of noisy
gates per gate configuration (one random stream per ``xi`` value, or per
``sigma0`` value for the two-qubit gate) and evaluate that batch on every
input state of the grid, so results do not depend on how work is split
across processes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .errors import DomainError
from .fieldpath import DEFAULT_STEPS
from .gates import TwoQubitParams, controlled_gate, two_loop_gate
from .noise import NoiseSpec, RNG_ALGORITHM, draw_single, make_rng, noisy_controlled_gate
from .qmath import bloch_to_state, dagger

__all__ = [
    "DEFAULT_DELTA_OMEGA",
    "DEFAULT_N_SAMPLES",
    "DEFAULT_SIGMA0_LIST",
    "default_theta_grid",
    "default_phi_grid",
    "default_xi_grid",
    "FidelityPoint",
    "FidelityTable",
    "shot_fidelity",
    "average_fidelity",
    "average_fidelity_two_qubit",
    "two_qubit_input",
    "sweep_single",
    "sweep_two_qubit",
]

DEFAULT_DELTA_OMEGA = 2 * np.pi * 0.3
DEFAULT_N_SAMPLES = 10_000
DEFAULT_SIGMA0_LIST = (0.02, 0.04, 0.06, 0.08, 0.10)
GRID_POINTS = 51

# First element of every random-stream key; keeps sweep families disjoint.
_STREAM_SINGLE = 0
_STREAM_TWO_QUBIT = 1


def default_theta_grid(n=GRID_POINTS):
    return np.linspace(0.0, np.pi, n)


def default_phi_grid(n=GRID_POINTS):
    return np.linspace(0.0, 2 * np.pi, n)


def default_xi_grid(n=GRID_POINTS):
    # endpoints trimmed: both ends are trivial-gate plateaus
    return np.linspace(0.02, np.pi / 2 - 0.02, n)


@dataclass(frozen=True)
class FidelityPoint:
    mean: float
    stderr: float
    n: int
    coords: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("a fidelity point needs at least one sample")


@dataclass
class FidelityTable:
    """Two-axis grid of average fidelities.

    ``mean[i, j]`` belongs to ``axes[0]`` value ``i`` and ``axes[1]`` value
    ``j``.  ``fixed`` holds coordinates that are constant over the grid (they
    are written as extra CSV columns).
    """

    axes: tuple[tuple[str, np.ndarray], tuple[str, np.ndarray]]
    mean: np.ndarray
    stderr: np.ndarray
    n: int
    fixed: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = tuple(len(v) for _, v in self.axes)
        if self.mean.shape != shape or self.stderr.shape != shape:
            raise DomainError(f"grid shape {self.mean.shape} does not match axes {shape}")

    @property
    def columns(self) -> list[str]:
        return [name for name, _ in self.axes] + list(self.fixed) + ["mean_fidelity", "std_error", "n_samples"]

    def rows(self):
        (_, a0), (_, a1) = self.axes
        fixed = list(self.fixed.values())
        for i, x0 in enumerate(a0):
            for j, x1 in enumerate(a1):
                yield [float(x0), float(x1), *fixed, float(self.mean[i, j]), float(self.stderr[i, j]), self.n]

    def min(self) -> float:
        return float(self.mean.min())

    def max(self) -> float:
        return float(self.mean.max())

    def argmin(self) -> dict:
        i, j = np.unravel_index(int(np.argmin(self.mean)), self.mean.shape)
        (n0, a0), (n1, a1) = self.axes
        return {n0: float(a0[i]), n1: float(a1[j]), **self.fixed}

    def to_dict(self) -> dict:
        return {
            "axes": {name: [float(v) for v in values] for name, values in self.axes},
            "fixed": dict(self.fixed),
            "mean_fidelity": self.mean.tolist(),
            "std_error": self.stderr.tolist(),
            "n_samples": self.n,
            "min": self.min(),
            "max": self.max(),
            "argmin": self.argmin(),
            "metadata": dict(self.metadata),
        }


def shot_fidelity(u_ideal, u_noise, psi):
    """``|<psi| U_ideal^dag U_noise |psi>|^2``; ``u_noise`` may carry leading batch axes."""
    u_ideal = np.asarray(u_ideal, dtype=complex)
    u_noise = np.asarray(u_noise, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    d = psi.shape[-1]
    if u_ideal.shape != (d, d) or u_noise.shape[-2:] != (d, d):
        raise DomainError(f"dimension mismatch: {u_ideal.shape}, {u_noise.shape}, state {psi.shape}")
    amp = np.einsum("i,ij,...jk,k->...", psi.conj(), dagger(u_ideal), u_noise, psi)
    out = np.abs(amp) ** 2
    return float(out) if out.ndim == 0 else out


def _grid_stats(u_ideal, u_noise, states):
    """Mean and standard error of the shot fidelity for each row of ``states``."""
    v = dagger(u_ideal) @ u_noise
    amp = np.einsum("pi,nij,pj->pn", states.conj(), v, states)
    f = np.abs(amp) ** 2
    n = f.shape[1]
    return f.mean(axis=1), f.std(axis=1) / np.sqrt(n)


def average_fidelity(nu, delta_omega, psi, spec: NoiseSpec, n_samples: int = DEFAULT_N_SAMPLES,
                     eta=0.0, rng=None) -> FidelityPoint:
    """Average fidelity of the noisy two-loop single-qubit gate on one input state."""
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    rng = make_rng(spec.seed) if rng is None else rng
    u0 = two_loop_gate(nu, delta_omega, eta)
    un = draw_single(nu, delta_omega, spec, rng, n_samples).gates(eta)
    m, s = _grid_stats(u0, un, np.asarray(psi, dtype=complex)[None, :])
    return FidelityPoint(float(m[0]), float(s[0]), int(n_samples),
                         {"nu": float(nu), "delta_omega": float(delta_omega), "eta": float(eta)})


def two_qubit_input(theta) -> np.ndarray:
    """``(cos(theta/2)|+> + sin(theta/2)|->)_C (x) |0>_T`` in the controlled-gate basis."""
    return np.array([np.cos(theta / 2), 0, np.sin(theta / 2), 0], dtype=complex)


def _noisy_two_qubit_batch(p: TwoQubitParams, sigma0, seed, key, n_samples, n_steps):
    rng = make_rng(seed, _STREAM_TWO_QUBIT, key)
    return noisy_controlled_gate(p, NoiseSpec(sigma0, 0.0, seed), rng, n_samples, n_steps)


def average_fidelity_two_qubit(p: TwoQubitParams, theta, spec: NoiseSpec,
                               n_samples: int = DEFAULT_N_SAMPLES, key: int = 0,
                               n_steps: int = DEFAULT_STEPS) -> FidelityPoint:
    """Average fidelity of the noisy controlled gate on ``two_qubit_input(theta)``.

    Uses the same random stream as row ``key`` of :func:`sweep_two_qubit`.
    """
    if spec.sigma1 != 0:
        raise DomainError("the two-qubit noise model only perturbs delta_omega (sigma1 must be 0)")
    un = _noisy_two_qubit_batch(p, spec.sigma0, spec.seed, key, n_samples, n_steps)
    m, s = _grid_stats(controlled_gate(p, n_steps), un, two_qubit_input(theta)[None, :])
    return FidelityPoint(float(m[0]), float(s[0]), int(n_samples), {"theta_i": float(theta)})


def _input_states(axis, values):
    if axis == "theta_i":
        return np.array([bloch_to_state(t, 0.0) for t in values]), {"phi_i": 0.0}
    if axis == "phi_i":
        return np.array([bloch_to_state(np.pi / 2, p) for p in values]), {"theta_i": np.pi / 2}
    raise DomainError(f"axis must be 'theta_i' or 'phi_i', got {axis!r}")


def _single_row(k, xi, *, delta_omega, eta, spec, n_samples, states):
    nu = delta_omega * np.tan(xi)
    rng = make_rng(spec.seed, _STREAM_SINGLE, k)
    u0 = two_loop_gate(nu, delta_omega, eta)
    un = draw_single(nu, delta_omega, spec, rng, n_samples).gates(eta)
    return _grid_stats(u0, un, states)


def _two_qubit_row(k, sigma0, *, p, seed, n_samples, n_steps, states, u0):
    un = _noisy_two_qubit_batch(p, sigma0, seed, k, n_samples, n_steps)
    return _grid_stats(u0, un, states)


def _run(fn, items, workers):
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, *zip(*items)))


def sweep_single(axis, axis_values, xi_values, spec: NoiseSpec,
                 n_samples: int = DEFAULT_N_SAMPLES, delta_omega=DEFAULT_DELTA_OMEGA,
                 eta=0.0, workers: int = 1) -> FidelityTable:
    """Single-qubit fidelity over ``xi`` x input-state grid.

    ``axis`` is ``"theta_i"`` (inputs on the phi_i = 0 meridian) or ``"phi_i"``
    (inputs on the equator).  Each ``xi`` is realised at fixed nominal
    ``delta_omega`` with ``nu = delta_omega * tan(xi)``.
    """
    axis_values = np.asarray(axis_values, dtype=float)
    xi_values = np.asarray(xi_values, dtype=float)
    if axis_values.size == 0 or xi_values.size == 0:
        raise DomainError("sweep grids must be non-empty")
    if np.any(xi_values < 0) or np.any(xi_values >= np.pi / 2):
        raise DomainError("xi grid must lie in [0, pi/2) for a positive detuning")
    states, fixed = _input_states(axis, axis_values)
    fn = partial(_single_row, delta_omega=float(delta_omega), eta=float(eta), spec=spec,
                 n_samples=int(n_samples), states=states)
    rows = _run(fn, list(enumerate(xi_values)), workers)
    mean = np.array([r[0] for r in rows])
    stderr = np.array([r[1] for r in rows])
    meta = {
        "kind": "single",
        "sigma0": spec.sigma0,
        "sigma1": spec.sigma1,
        "relative_noise": spec.relative,
        "seed": int(spec.seed),
        "rng": RNG_ALGORITHM,
        "delta_omega_rad_per_ns": float(delta_omega),
        "eta": float(eta),
        "n_samples": int(n_samples),
    }
    return FidelityTable((("xi", xi_values), (axis, axis_values)), mean, stderr, int(n_samples),
                         fixed, meta)


def sweep_two_qubit(theta_values, sigma0_values, p: TwoQubitParams,
                    n_samples: int = DEFAULT_N_SAMPLES, seed: int = 0,
                    n_steps: int = DEFAULT_STEPS, workers: int = 1) -> FidelityTable:
    """Controlled-gate fidelity over ``sigma0`` x control-state angle ``theta_i``."""
    theta_values = np.asarray(theta_values, dtype=float)
    sigma0_values = np.asarray(sigma0_values, dtype=float)
    if theta_values.size == 0 or sigma0_values.size == 0:
        raise DomainError("sweep grids must be non-empty")
    states = np.array([two_qubit_input(t) for t in theta_values])
    fn = partial(_two_qubit_row, p=p, seed=int(seed), n_samples=int(n_samples),
                 n_steps=int(n_steps), states=states, u0=controlled_gate(p, n_steps))
    rows = _run(fn, list(enumerate(sigma0_values)), workers)
    meta = {
        "kind": "two-qubit",
        "nu_rad_per_ns": p.nu,
        "delta_omega_rad_per_ns": p.delta_omega,
        "J_rad_per_ns": p.J,
        "sigma1": 0.0,
        "relative_noise": True,
        "seed": int(seed),
        "rng": RNG_ALGORITHM,
        "n_samples": int(n_samples),
        "quadrature_steps": int(n_steps),
    }
    return FidelityTable((("sigma0", sigma0_values), ("theta_i", theta_values)),
                         np.array([r[0] for r in rows]), np.array([r[1] for r in rows]),
                         int(n_samples), {}, meta)
