import numpy as np
import pytest
from scipy.integrate import solve_ivp

from geogate.errors import DomainError, ResolutionError
from geogate.fieldpath import GATE_DIRECTION, cone_berry_phase, cone_path, gate_loop, two_loop
from geogate.gates import eigenstates, two_loop_gate
from geogate.oracle import (
    CHECKPOINTS,
    adiabatic_convergence,
    adiabaticity,
    auto_steps,
    dynamic_phase,
    evolve,
    wrap_phase,
)
from geogate.qmath import PAULI, bloch_to_state

NU = DW = 2 * np.pi * 0.3
NORM = np.hypot(NU, DW)
SIGMA = np.stack(PAULI)


def reference_state(seq, psi0):
    """Adaptive Dormand-Prince integration, segment by segment."""
    psi = np.asarray(psi0, complex)
    for path in seq.segments:
        def rhs(t, y):
            b = path.field(t)
            return -0.5j * np.einsum("k,kij,j->i", b, SIGMA, y)
        sol = solve_ivp(rhs, (0, path.tau0), psi, method="DOP853", rtol=1e-12, atol=1e-12)
        psi = sol.y[:, -1]
    return psi


def tau_for(periods):
    return periods * 2 * np.pi / NORM


def test_wrap_phase():
    assert wrap_phase(np.pi) == np.pi
    assert wrap_phase(-np.pi) == np.pi
    assert wrap_phase(3 * np.pi / 2) == pytest.approx(-np.pi / 2)
    assert np.allclose(wrap_phase(np.array([0.0, 7.0])), [0.0, 7.0 - 2 * np.pi])


def test_matches_adaptive_integrator():
    seq = gate_loop(NU, DW, 0.4, tau_for(3))
    psi0 = bloch_to_state(1.1, 0.3)
    res = evolve(seq, psi0)
    assert np.allclose(res.final_state, reference_state(seq, psi0), atol=1e-7)


def test_unwrapped_phase_consistent_with_total():
    seq = gate_loop(NU, DW, 0.0, tau_for(20))
    psi, _ = eigenstates(np.pi / 4)
    res = evolve(seq, psi)
    assert wrap_phase(res.unwrapped_phase - res.total_phase) == pytest.approx(0.0, abs=1e-9)
    assert len(res.checkpoint_phases) == 2 * CHECKPOINTS + 1


def test_single_loop_unwrapped_tracks_dynamic_plus_geometric():
    tau0 = tau_for(200)
    path = cone_path(NU, DW, 0.0, tau0, GATE_DIRECTION)
    psi, _ = eigenstates(np.pi / 4)
    res = evolve(path, psi)
    assert res.dynamic_phase == pytest.approx(-NORM * tau0 / 2, rel=1e-9)
    assert res.geometric_phase == pytest.approx(cone_berry_phase(NU, DW), abs=5e-3)


def test_two_loop_cancels_dynamic_phase():
    psi, _ = eigenstates(np.pi / 4)
    res = evolve(gate_loop(NU, DW, 0.0, tau_for(200)), psi)
    assert abs(res.dynamic_phase) < 1e-9
    assert abs(wrap_phase(res.total_phase - 2 * cone_berry_phase(NU, DW))) < 5e-3
    assert res.leakage < 1e-3


def test_propagator_approaches_gate():
    res = evolve(gate_loop(NU, DW, 0.3, tau_for(200)), np.array([1, 0]))
    u = two_loop_gate(NU, DW, 0.3)
    assert np.max(np.abs(res.propagator - u)) < 1e-2


def test_unitarity_defect_at_fixed_resolution():
    # RK4 at 1e4 steps per loop: a few tens of Larmor periods keep the defect below 1e-8
    for periods in (1, 10, 30):
        res = evolve(gate_loop(NU, DW, 0.0, tau_for(periods)), np.array([1, 0]), 10_048)
        assert res.unitarity_defect < 1e-8


def test_resolution_guards():
    seq = gate_loop(NU, DW, 0.0, tau_for(200))
    with pytest.raises(ResolutionError):
        evolve(seq, np.array([1, 0]), 960)
    with pytest.raises(ResolutionError):
        evolve(seq, np.array([1, 0]), 10_048)
    with pytest.raises(DomainError):
        evolve(seq, np.array([1, 0]), 1001)


def test_auto_steps():
    seq = gate_loop(NU, DW, 0.0, tau_for(200))
    n = auto_steps(seq)
    assert n % CHECKPOINTS == 0
    assert NORM * seq.segments[0].tau0 / n <= 0.01
    assert auto_steps(gate_loop(NU, DW, 0.0, 0.1)) >= 1000


def test_dynamic_phase_signs():
    p = cone_path(NU, DW, 0.0, 10.0)
    rev = two_loop(p).segments[1]
    assert dynamic_phase(p, 1) == pytest.approx(-NORM * 5.0)
    assert dynamic_phase(p, -1) == pytest.approx(NORM * 5.0)
    assert dynamic_phase(rev, 1) == pytest.approx(NORM * 5.0)
    with pytest.raises(DomainError):
        dynamic_phase(p, 2)


def test_adiabaticity():
    assert adiabaticity(NU, DW, tau_for(200)) == pytest.approx(200)


def test_convergence_improves_with_loop_time():
    rows = adiabatic_convergence(NU, DW, [tau_for(5), tau_for(50), tau_for(200)])
    errors = [r.phase_error for r in rows]
    leak = [r.leakage for r in rows]
    assert errors[-1] < errors[0] and leak[-1] < leak[0]
    assert errors[-1] < 5e-3
    with pytest.raises(DomainError):
        adiabatic_convergence(NU, DW, [2.0, 1.0])


def test_default_resolution_keeps_defect_small():
    res = evolve(gate_loop(NU, DW, 0.0, tau_for(200)), np.array([1, 0]))
    assert res.unitarity_defect < 1e-8
    assert 0.0 <= res.survival <= 1.0 + 1e-12
