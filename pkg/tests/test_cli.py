import json

import numpy as np
import pytest

from geogate import __version__
from geogate.cli import EXIT_CONFIG, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_OK, main
from geogate.config import load_config
from geogate.errors import ConfigError
from geogate.noise import RNG_ALGORITHM
from geogate.report import read_csv

FAST = ["--set", "fidelity.n_samples=200", "--set", "fidelity.grid_points=5"]


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_config_defaults_from_preset():
    cfg = load_config()
    assert cfg.nu == pytest.approx(2 * np.pi * 0.3)
    assert cfg.J == pytest.approx(2 * np.pi * 0.15)
    assert cfg.tau0 == 400.0
    assert cfg.noise_spec().sigma0 == 0.1


def test_config_file_and_precedence(tmp_path):
    f = tmp_path / "run.ini"
    f.write_text("[model]\nnu_ghz = 0.5\n[noise]\nsigma0 = 0.05\nchannels = detuning\n[run]\nseed = 3\n")
    cfg = load_config(f, {"run.seed": "9"})
    assert cfg["model.nu_ghz"] == 0.5 and cfg.seed == 9
    spec = cfg.noise_spec()
    assert spec.sigma0 == 0.05 and spec.sigma1 == 0.0


def test_absolute_noise_is_converted():
    spec = load_config(None, {"noise.mode": "absolute", "noise.sigma0": "0.01"}).noise_spec()
    assert not spec.relative and spec.sigma0 == pytest.approx(2 * np.pi * 0.01)


@pytest.mark.parametrize("text", [
    "[model]\nbogus = 1\n",
    "[nosuch]\na = 1\n",
    "[noise]\nsigma0 = abc\n",
    "[noise]\nmode = loud\n",
    "[run]\nseed = -1\n",
    "[model]\npreset = none\n",
    "not an ini file",
])
def test_bad_config_rejected(tmp_path, text):
    f = tmp_path / "bad.ini"
    f.write_text(text)
    with pytest.raises(ConfigError):
        load_config(f)


def test_explicit_model_without_preset():
    cfg = load_config(None, {"model.preset": "none", "model.nu_ghz": "0.2", "model.delta_omega_ghz": "0.3",
                             "model.J_ghz": "0.1", "model.omega10_ghz": "6", "model.tau0_ns": "100"})
    assert cfg.preset is None and cfg.tau0 == 100.0


def test_berry_output_and_provenance(tmp_path, capsys):
    assert run(tmp_path, "berry", "--seed", "5") == EXIT_OK
    assert "0.9201511845" in capsys.readouterr().out
    header, cols, rows = read_csv(tmp_path / "berry.csv")
    assert header["tool"] == f"geogate {__version__}"
    assert header["rng"] == RNG_ALGORITHM and header["seed"] == "5"
    assert header["config"]["model"]["preset"] == "paper-2007"
    assert "workers" not in header["config"]["run"]
    assert abs(float(rows[0][cols.index("difference")])) < 1e-8
    doc = json.loads((tmp_path / "berry.json").read_text())
    assert doc["schema_version"] == 1 and doc["seed"] == 5 and doc["version"] == __version__


def test_berry_trivial_and_singular(tmp_path):
    assert run(tmp_path, "berry", "--set", "model.nu_ghz=0") == EXIT_OK
    _, cols, rows = read_csv(tmp_path / "berry.csv")
    assert float(rows[0][cols.index("quadrature")]) == 0.0
    code = run(tmp_path, "berry", "--set", "model.nu_ghz=0", "--set", "model.delta_omega_ghz=-0.3")
    assert code == EXIT_NUMERIC


def test_exit_codes(tmp_path):
    assert run(tmp_path, "berry", "--set", "model.bogus=1") == EXIT_CONFIG
    assert run(tmp_path, "berry", "--preset", "unknown") == EXIT_CONFIG
    assert run(tmp_path, "gate", "--set", "gate.kind=custom", "--set", "gate.xi=5") == EXIT_DOMAIN
    assert run(tmp_path, "oracle", "--set", "oracle.steps_per_loop=1024",
               "--set", "oracle.larmor_periods=200") == EXIT_NUMERIC
    assert main(["nosuch"]) == EXIT_CONFIG


def test_gate_not(tmp_path, capsys):
    assert run(tmp_path, "gate") == EXIT_OK
    _, _, rows = read_csv(tmp_path / "gate.csv")
    u = np.zeros((2, 2), complex)
    for i, j, re, im in rows:
        u[int(i), int(j)] = float(re) + 1j * float(im)
    assert np.allclose(u, [[0, 1j], [1j, 0]], atol=1e-12)


def test_gate_controlled_documents_basis(tmp_path):
    assert run(tmp_path, "gate", "--set", "gate.kind=controlled") == EXIT_OK
    doc = json.loads((tmp_path / "gate.json").read_text())["result"]
    assert doc["basis"][0] == "|+>_C|0>_T"
    assert doc["unitarity_defect"] < 1e-10
    assert doc["gamma_plus"] == pytest.approx(doc["gamma_minus"], abs=1e-9)


def test_fidelity_smoke_noiseless(tmp_path, capsys):
    assert run(tmp_path, "fidelity", *FAST, "--set", "noise.channels=none") == EXIT_OK
    for name in ("theta", "phi"):
        _, cols, rows = read_csv(tmp_path / f"fidelity_{name}.csv")
        assert cols[:2] == ["xi", f"{name}_i"]
        assert all(float(r[cols.index("mean_fidelity")]) == pytest.approx(1.0) for r in rows)
    assert "min 1.000000" in capsys.readouterr().out


def test_fidelity_axis_selection(tmp_path):
    assert run(tmp_path, "fidelity", *FAST, "--set", "fidelity.axis=phi") == EXIT_OK
    assert (tmp_path / "fidelity_phi.csv").exists() and not (tmp_path / "fidelity_theta.csv").exists()


def test_two_qubit_and_params(tmp_path, capsys):
    assert run(tmp_path, "two-qubit", *FAST, "--set", "fidelity.sigma0_list=0.05,0.1") == EXIT_OK
    _, cols, rows = read_csv(tmp_path / "two_qubit.csv")
    assert len(rows) == 2 * 5 and cols[0] == "sigma0"
    assert run(tmp_path, "params") == EXIT_OK
    assert "15.23 nA" in capsys.readouterr().out


def test_oracle_and_tomo(tmp_path):
    assert run(tmp_path, "oracle", "--set", "oracle.larmor_periods=20,200") == EXIT_OK
    _, cols, rows = read_csv(tmp_path / "oracle.csv")
    assert float(rows[-1][cols.index("two_loop_error")]) < 5e-3
    assert run(tmp_path, "tomo", "--set", "tomo.trials=20") == EXIT_OK
    doc = json.loads((tmp_path / "tomo.json").read_text())["result"]
    assert doc["analytic_phase"] == pytest.approx(np.pi / 2, abs=1e-14)
    _, cols, rows = read_csv(tmp_path / "tomo.csv")
    assert len(rows) == 8


def test_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["fidelity", *FAST, "--workers", "1", "--out", str(a)])
    main(["fidelity", *FAST, "--workers", "4", "--out", str(b)])
    for name in ("fidelity_theta.csv", "fidelity_phi.csv", "fidelity_theta.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
