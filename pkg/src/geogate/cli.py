"""``geogate`` command-line entry point.

Each subcommand resolves a :class:`~geogate.config.RunConfig`, runs one
workflow and writes CSV (plot-ready) and JSON (metadata-rich) files to the
output directory.  A one-line summary goes to stdout.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .errors import ConfigError, DomainError, ResolutionError, SingularityError
from .fieldpath import GATE_DIRECTION, cone_berry_phase, cone_path, gate_loop, solid_angle
from .fidelity import default_phi_grid, default_theta_grid, sweep_single, sweep_two_qubit
from .gates import (
    CONTROL_BASIS,
    GateParams,
    controlled_angles,
    controlled_gate,
    eigenstates,
    state_prep_minus,
    to_computational_basis,
    two_loop_params,
    two_qubit_phase,
)
from .noise import make_rng, thermal_noise_current
from .oracle import adiabaticity, auto_steps, evolve, wrap_phase
from .physparams import (
    barrier_height,
    coupling_strength,
    josephson_inductance,
    plasma_frequency,
    rad_per_ns_to_ghz,
)
from .qmath import check_unitary
from .report import provenance, write_csv, write_json
from .tomography import run_tomography

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_NUMERIC = 4  # singularity or insufficient resolution

# first element of random-stream keys used by the CLI itself
_STREAM_TOMO = 2


def _prov(cfg: RunConfig) -> dict:
    return provenance(cfg.provenance(), cfg.seed)


def _out(cfg: RunConfig) -> Path:
    return Path(cfg["run.out"])


def _matrix_rows(u):
    u = np.asarray(u)
    return [[i, j, float(u[i, j].real), float(u[i, j].imag)]
            for i in range(u.shape[0]) for j in range(u.shape[1])]


def cmd_berry(cfg: RunConfig) -> str:
    nu, dw, eta, tau0 = cfg.nu, cfg.delta_omega, cfg["model.eta"], cfg.tau0
    closed = cone_berry_phase(nu, dw) if nu > 0 else 0.0
    quad = solid_angle(cone_path(nu, dw, eta, tau0), cfg["fidelity.quadrature_steps"]) / 2
    diff = quad - closed
    cols = ["nu_ghz", "delta_omega_ghz", "closed_form", "quadrature", "difference"]
    row = [cfg["model.nu_ghz"], cfg["model.delta_omega_ghz"], closed, quad, diff]
    prov = _prov(cfg)
    write_csv(_out(cfg) / "berry.csv", cols, [row], prov)
    write_json(_out(cfg) / "berry.json", "berry", dict(zip(cols, row)), prov)
    return f"berry: closed form {closed:.10f} rad, quadrature {quad:.10f} rad, difference {diff:.3e}"


def cmd_gate(cfg: RunConfig) -> str:
    kind = cfg["gate.kind"]
    prov = _prov(cfg)
    out = _out(cfg)
    if kind == "controlled":
        p = cfg.two_qubit_params()
        n = cfg["fidelity.quadrature_steps"]
        u = controlled_gate(p, n)
        xp, xm = controlled_angles(p)
        gp, gm = two_qubit_phase(p, 1, n), two_qubit_phase(p, -1, n)
        ok, defect = check_unitary(u)
        info = {
            "basis": list(CONTROL_BASIS),
            "basis_note": "control qubit in the sigma_y eigenbasis |+-> = (|0> +- i|1>)/sqrt(2)",
            "gamma_plus": gp, "gamma_minus": gm, "gamma": 2 * gp,
            "xi_plus": xp, "xi_minus": xm, "eta": np.pi / 2,
            "block_plus": u[:2, :2], "block_minus": u[2:, 2:],
            "computational_basis": to_computational_basis(u),
            "unitarity_defect": defect, "determinant": complex(np.linalg.det(u)),
        }
    else:
        # two loops double gamma_g: gamma_g = pi/4 gives gamma = pi/2
        if kind == "not":
            gp = GateParams(np.pi / 2, np.pi / 2, 0.0)
        elif kind == "hadamard":
            gp = GateParams(np.pi / 2, np.pi / 4, 0.0)
        elif kind == "two-loop":
            gp = two_loop_params(cfg.nu, cfg.delta_omega, cfg["model.eta"])
        elif kind == "state-prep":
            gp = GateParams(np.pi / 4, np.pi / 2, 0.0)
        else:
            gp = GateParams(cfg["gate.gamma"], cfg["gate.xi"], cfg["model.eta"])
        u = gp.unitary()
        ok, defect = check_unitary(u)
        info = {"gamma": gp.gamma, "xi": gp.xi, "eta": gp.eta, "unitary": u,
                "unitarity_defect": defect, "determinant": complex(np.linalg.det(u))}
        if kind == "state-prep":
            info["prepared_state"] = state_prep_minus()
    write_csv(out / "gate.csv", ["row", "col", "re", "im"], _matrix_rows(u), prov)
    write_json(out / "gate.json", f"gate:{kind}", info, prov)
    text = np.array2string(u, precision=6, suppress_small=True)
    return f"gate {kind} (unitarity defect {defect:.2e}):\n{text}"


def _single_sweeps(cfg: RunConfig):
    g = cfg["fidelity.grid_points"]
    xi = np.linspace(cfg["fidelity.xi_min"], cfg["fidelity.xi_max"], g)
    axes = {"theta": ("theta_i", default_theta_grid(g)), "phi": ("phi_i", default_phi_grid(g))}
    which = ("theta", "phi") if cfg["fidelity.axis"] == "both" else (cfg["fidelity.axis"],)
    for name in which:
        axis, values = axes[name]
        yield name, sweep_single(axis, values, xi, cfg.noise_spec(), cfg["fidelity.n_samples"],
                                 cfg.delta_omega, cfg["model.eta"], cfg.workers)


def cmd_fidelity(cfg: RunConfig) -> str:
    prov = _prov(cfg)
    lo, hi = np.inf, -np.inf
    for name, table in _single_sweeps(cfg):
        write_csv(_out(cfg) / f"fidelity_{name}.csv", table.columns, table.rows(), prov)
        write_json(_out(cfg) / f"fidelity_{name}.json", "fidelity", table.to_dict(), prov)
        lo, hi = min(lo, table.min()), max(hi, table.max())
    return f"fidelity ({cfg['noise.channels']} noise): min {lo:.6f}, max {hi:.6f}"


def cmd_two_qubit(cfg: RunConfig) -> str:
    prov = _prov(cfg)
    theta = default_theta_grid(cfg["fidelity.grid_points"])
    table = sweep_two_qubit(theta, cfg["fidelity.sigma0_list"], cfg.two_qubit_params(),
                            cfg["fidelity.n_samples"], cfg.seed,
                            cfg["fidelity.quadrature_steps"], cfg.workers)
    write_csv(_out(cfg) / "two_qubit.csv", table.columns, table.rows(), prov)
    write_json(_out(cfg) / "two_qubit.json", "two-qubit", table.to_dict(), prov)
    return f"two-qubit fidelity: min {table.min():.6f}, max {table.max():.6f}"


def cmd_oracle(cfg: RunConfig) -> str:
    nu, dw, eta = cfg.nu, cfg.delta_omega, cfg["model.eta"]
    gamma0 = cone_berry_phase(nu, dw)
    norm = float(np.hypot(nu, dw))
    psi, _ = eigenstates(np.arctan2(nu, dw), eta)
    fixed = cfg["oracle.steps_per_loop"] or None
    cols = ["larmor_periods", "tau0_ns", "steps_per_loop", "two_loop_phase", "two_loop_error",
            "leakage", "unitarity_defect", "single_loop_phase", "single_loop_error"]
    rows = []
    for periods in cfg["oracle.larmor_periods"]:
        tau0 = periods * 2 * np.pi / norm
        seq = gate_loop(nu, dw, eta, tau0)
        n = fixed or auto_steps(seq)
        two = evolve(seq, psi, n)
        one = evolve(cone_path(nu, dw, eta, tau0, GATE_DIRECTION), psi, n)
        rows.append([
            adiabaticity(nu, dw, tau0), tau0, n, two.total_phase,
            abs(wrap_phase(two.total_phase - 2 * gamma0)), two.leakage, two.unitarity_defect,
            one.total_phase, abs(wrap_phase(one.total_phase - (gamma0 - norm * tau0 / 2))),
        ])
    prov = _prov(cfg)
    write_csv(_out(cfg) / "oracle.csv", cols, rows, prov)
    write_json(_out(cfg) / "oracle.json", "oracle",
               {"gamma_g0": gamma0, "target_two_loop": 2 * gamma0,
                "rows": [dict(zip(cols, r)) for r in rows]}, prov)
    last = rows[-1]
    return (f"oracle at {last[0]:.1f} Larmor periods: two-loop error {last[4]:.2e} rad, "
            f"leakage {last[5]:.2e}, single-loop error {last[8]:.2e} rad")


def cmd_tomo(cfg: RunConfig) -> str:
    theta, gamma = cfg["tomo.theta"], cfg["tomo.gamma_g"]
    shots, trials = cfg["tomo.shots"], cfg["tomo.trials"]
    analytic = run_tomography(theta, gamma, 0)
    target = wrap_phase(4 * gamma)
    runs = [run_tomography(theta, gamma, shots, make_rng(cfg.seed, _STREAM_TOMO, k))
            for k in range(trials)]
    errors = np.array([abs(wrap_phase(r.phase - target)) for r in runs])
    first = runs[0]
    cols = ["state", "row", "col", "re", "im"]
    rows = [[label, i, j, re, im]
            for label, rho in (("initial", first.rho_initial), ("final", first.rho_final))
            for i, j, re, im in _matrix_rows(rho)]
    prov = _prov(cfg)
    write_csv(_out(cfg) / "tomo.csv", cols, rows, prov)
    summary = {
        "theta": theta, "gamma_g": gamma, "shots": shots, "trials": trials,
        "expected_phase": target, "analytic_phase": analytic.phase,
        "trial_phases": [r.phase for r in runs],
        "fraction_within_0.05": float(np.mean(errors < 0.05)),
        "min_eigenvalue_first_trial": first.min_eigenvalue,
    }
    write_json(_out(cfg) / "tomo.json", "tomo", summary, prov)
    return (f"tomography: analytic phase {analytic.phase:.12f} rad, "
            f"{100 * summary['fraction_within_0.05']:.1f}% of {trials} trials within 0.05 rad")


def cmd_params(cfg: RunConfig) -> str:
    pre = cfg.preset
    if pre is None:
        raise ConfigError("params needs a preset for the junction parameters")
    omega10 = 2 * np.pi * cfg["model.omega10_ghz"]
    i_n = thermal_noise_current(pre.temperature, pre.resistance, pre.bandwidth)
    j = coupling_strength(pre.c_x, pre.c_j, omega10)
    rows = [
        ["thermal_noise_current", i_n, "A"],
        ["coupling_J_over_2pi", rad_per_ns_to_ghz(j), "GHz"],
        ["josephson_inductance_zero_bias", josephson_inductance(pre.i_c, 0.0), "H"],
        ["barrier_height_0.99Ic", barrier_height(0.99 * pre.i_c, pre.i_c), "J"],
        ["plasma_frequency_0.99Ic", plasma_frequency(0.99 * pre.i_c, pre.i_c, pre.c_j), "rad/s"],
        ["nu_rad_per_ns", cfg.nu, "rad/ns"],
        ["delta_omega_rad_per_ns", cfg.delta_omega, "rad/ns"],
        ["J_rad_per_ns", cfg.J, "rad/ns"],
        ["gamma_g0", cone_berry_phase(cfg.nu, cfg.delta_omega), "rad"],
        ["adiabaticity", adiabaticity(cfg.nu, cfg.delta_omega, cfg.tau0), "Larmor periods"],
    ]
    prov = _prov(cfg)
    write_csv(_out(cfg) / "params.csv", ["quantity", "value", "unit"], rows, prov)
    write_json(_out(cfg) / "params.json", "params", {r[0]: {"value": r[1], "unit": r[2]} for r in rows}, prov)
    return f"params: I_n = {i_n * 1e9:.2f} nA, J/2pi = {rad_per_ns_to_ghz(j) * 1e3:.1f} MHz"


COMMANDS = {
    "berry": cmd_berry,
    "gate": cmd_gate,
    "fidelity": cmd_fidelity,
    "two-qubit": cmd_two_qubit,
    "oracle": cmd_oracle,
    "tomo": cmd_tomo,
    "params": cmd_params,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI configuration file")
    common.add_argument("--seed", type=int, metavar="U64", help="random seed")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--workers", type=int, metavar="N", help="worker processes (0 = all cores)")
    common.add_argument("--preset", metavar="NAME", help="named parameter set")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one configuration value (repeatable)")
    parser = _Parser(prog="geogate", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"geogate {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve_config(args) -> RunConfig:
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    for flag, key in (("preset", "model.preset"), ("seed", "run.seed"),
                      ("out", "run.out"), ("workers", "run.workers")):
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = value
    return load_config(args.config, overrides)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        print(COMMANDS[args.command](cfg))
    except ConfigError as exc:
        print(f"geogate: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularityError, ResolutionError) as exc:
        print(f"geogate: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"geogate: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
