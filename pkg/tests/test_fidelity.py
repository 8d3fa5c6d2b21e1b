import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geogate.errors import DomainError
from geogate.fidelity import (
    FidelityPoint,
    FidelityTable,
    average_fidelity,
    average_fidelity_two_qubit,
    default_phi_grid,
    default_theta_grid,
    default_xi_grid,
    shot_fidelity,
    sweep_single,
    sweep_two_qubit,
    two_qubit_input,
)
from geogate.gates import TwoQubitParams
from geogate.noise import NoiseSpec
from geogate.qmath import bloch_to_state

from oracles import exact_single_fidelity, exact_two_qubit_fidelity

P2Q = TwoQubitParams(2 * np.pi * 0.3, 2 * np.pi * 0.3, 2 * np.pi * 0.15)


def test_default_grids():
    assert default_theta_grid()[[0, -1]].tolist() == [0.0, np.pi]
    assert default_phi_grid()[-1] == pytest.approx(2 * np.pi)
    xi = default_xi_grid()
    assert len(xi) == 51 and xi[0] == pytest.approx(0.02) and xi[-1] == pytest.approx(np.pi / 2 - 0.02)


def test_shot_fidelity_basics():
    u = np.array([[0, 1j], [1j, 0]])
    psi = np.array([1, 0], complex)
    assert shot_fidelity(u, u, psi) == pytest.approx(1.0)
    assert shot_fidelity(np.eye(2), u, psi) == pytest.approx(0.0)
    assert shot_fidelity(u, np.stack([u, np.eye(2)]), psi).tolist() == pytest.approx([1.0, 0.0])
    with pytest.raises(DomainError):
        shot_fidelity(np.eye(4), u, psi)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 1.5), st.floats(0, np.pi), st.floats(0, 2 * np.pi), st.integers(0, 2**32))
def test_noiseless_fidelity_is_one(xi, theta, phi, seed):
    pt = average_fidelity(np.tan(xi), 1.0, bloch_to_state(theta, phi), NoiseSpec(seed=seed), 50)
    assert pt.mean == pytest.approx(1.0, abs=1e-12)
    assert pt.stderr == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("sigmas", [(0.1, 0.0), (0.0, 0.1), (0.1, 0.1)])
def test_monte_carlo_matches_quadrature(sigmas):
    xi, theta, phi = 0.938, np.pi / 2, 1.63
    psi = bloch_to_state(theta, phi)
    pt = average_fidelity(np.tan(xi), 1.0, psi, NoiseSpec(*sigmas, seed=11), 40_000)
    exact = exact_single_fidelity([xi], [psi], *sigmas)[0, 0]
    assert abs(pt.mean - exact) < 5 * pt.stderr + 1e-12
    assert pt.stderr <= 0.5 / np.sqrt(pt.n)


def test_sweep_matches_quadrature_grid():
    xi = np.linspace(0.1, 1.4, 5)
    th = np.linspace(0, np.pi, 5)
    t = sweep_single("theta_i", th, xi, NoiseSpec(0.1, 0.1, seed=3), 20_000, delta_omega=1.0)
    exact = exact_single_fidelity(xi, [bloch_to_state(a, 0.0) for a in th], 0.1, 0.1)
    assert np.all(np.abs(t.mean - exact) < 5 * t.stderr + 1e-12)
    assert t.axes[0][0] == "xi" and t.fixed == {"phi_i": 0.0}


def test_sweep_worker_invariance():
    spec = NoiseSpec(0.1, 0.1, seed=9)
    xi = np.linspace(0.1, 1.4, 6)
    a = sweep_single("phi_i", default_phi_grid(7), xi, spec, 500, workers=1)
    b = sweep_single("phi_i", default_phi_grid(7), xi, spec, 500, workers=3)
    assert np.array_equal(a.mean, b.mean) and np.array_equal(a.stderr, b.stderr)


def test_sweep_row_uses_same_draws_across_states():
    spec = NoiseSpec(0.1, 0.1, seed=4)
    xi = np.array([0.5, 0.9])
    a = sweep_single("theta_i", [0.3, 1.2], xi, spec, 300)
    b = sweep_single("theta_i", [1.2], xi, spec, 300)
    assert np.array_equal(a.mean[:, 1], b.mean[:, 0])


def test_sweep_validation():
    with pytest.raises(DomainError):
        sweep_single("theta_i", [0.1], [np.pi / 2], NoiseSpec())
    with pytest.raises(DomainError):
        sweep_single("r", [0.1], [0.5], NoiseSpec())
    with pytest.raises(DomainError):
        sweep_single("theta_i", [], [0.5], NoiseSpec())


def test_two_qubit_input_basis():
    assert np.allclose(two_qubit_input(0.0), [1, 0, 0, 0])
    assert np.allclose(two_qubit_input(np.pi), [0, 0, 1, 0], atol=1e-15)


def test_two_qubit_matches_quadrature():
    th = np.array([0.0, np.pi / 2, np.pi])
    t = sweep_two_qubit(th, [0.1], P2Q, 20_000, seed=2)
    exact = exact_two_qubit_fidelity(P2Q, 0.1, [two_qubit_input(a) for a in th])
    assert np.all(np.abs(t.mean[0] - exact) < 5 * t.stderr[0] + 1e-12)
    pt = average_fidelity_two_qubit(P2Q, np.pi / 2, NoiseSpec(0.1, seed=2), 20_000, key=0)
    assert pt.mean == t.mean[0, 1]


def test_two_qubit_rejects_drive_noise():
    with pytest.raises(DomainError):
        average_fidelity_two_qubit(P2Q, 0.0, NoiseSpec(0.1, 0.1), 10)


def test_two_qubit_noiseless():
    t = sweep_two_qubit([0.0, 1.0], [0.0], P2Q, 20)
    assert np.allclose(t.mean, 1.0, atol=1e-12)


def test_table_accessors():
    mean = np.array([[0.9, 0.8], [0.95, 1.0]])
    t = FidelityTable((("a", np.array([1.0, 2.0])), ("b", np.array([3.0, 4.0]))), mean,
                      np.zeros((2, 2)), 10, {"c": 0.5})
    assert t.min() == 0.8 and t.max() == 1.0
    assert t.argmin() == {"a": 1.0, "b": 4.0, "c": 0.5}
    assert t.columns == ["a", "b", "c", "mean_fidelity", "std_error", "n_samples"]
    assert list(t.rows())[1] == [1.0, 4.0, 0.5, 0.8, 0.0, 10]
    with pytest.raises(DomainError):
        FidelityTable(t.axes, mean[:1], mean[:1], 10)
    with pytest.raises(DomainError):
        FidelityPoint(1.0, 0.0, 0)


@pytest.mark.parametrize("xi", [0.3, 0.8, 1.2])
def test_eigenstate_input_is_most_robust(xi):
    spec = NoiseSpec(0.1, 0.1, seed=21)
    eig = average_fidelity(np.tan(xi), 1.0, bloch_to_state(xi, 0.0), spec, 5000)
    ortho = average_fidelity(np.tan(xi), 1.0, bloch_to_state(xi + np.pi / 2, 0.0), spec, 5000)
    assert eig.mean >= ortho.mean


def test_stderr_scales_as_inverse_sqrt_n():
    psi = bloch_to_state(np.pi / 2, 1.0)
    errs = [average_fidelity(1.0, 1.0, psi, NoiseSpec(0.1, 0.1, seed=5), n).stderr for n in (100, 1000, 10_000)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[0] / errs[2] == pytest.approx(10, rel=0.3)
