"""Run configuration: INI files, named presets and command-line overrides.

Precedence, lowest first: built-in defaults, the preset, the config file,
``--set section.key=value`` overrides and the dedicated flags.  Frequencies
are cyclic (GHz) in every user-facing place and converted to rad/ns here.
"""

from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass

from .errors import ConfigError, DomainError
from .gates import TwoQubitParams
from .noise import NoiseSpec
from .physparams import Preset, get_preset, ghz_to_rad_per_ns


def _floats(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]


# section -> key -> (parser, default); None defaults are filled from the preset
SCHEMA = {
    "model": {
        "preset": (str, "paper-2007"),
        "nu_ghz": (float, None),
        "delta_omega_ghz": (float, None),
        "J_ghz": (float, None),
        "omega10_ghz": (float, None),
        "eta": (float, 0.0),
        "tau0_ns": (float, None),
    },
    "noise": {
        "sigma0": (float, 0.1),
        "sigma1": (float, 0.1),
        "mode": (str, "relative"),
        "channels": (str, "both"),
    },
    "fidelity": {
        "n_samples": (int, 10_000),
        "grid_points": (int, 51),
        "xi_min": (float, 0.02),
        "xi_max": (float, math.pi / 2 - 0.02),
        "sigma0_list": (_floats, [0.02, 0.04, 0.06, 0.08, 0.10]),
        "quadrature_steps": (int, 4096),
        "axis": (str, "both"),
    },
    "oracle": {
        "steps_per_loop": (int, 0),
        "larmor_periods": (_floats, [10.0, 20.0, 50.0, 100.0, 200.0, 400.0]),
    },
    "tomo": {
        "theta": (float, math.pi / 2),
        "gamma_g": (float, math.pi / 8),
        "shots": (int, 10_000),
        "trials": (int, 200),
    },
    "gate": {
        "kind": (str, "not"),
        "gamma": (float, 0.0),
        "xi": (float, 0.0),
    },
    "run": {
        "seed": (int, 0),
        "workers": (int, 0),
        "out": (str, "results"),
    },
}

GATE_KINDS = ("not", "hadamard", "two-loop", "state-prep", "custom", "controlled")
NOISE_CHANNELS = ("both", "detuning", "drive", "none")
FIDELITY_AXES = ("both", "theta", "phi")
# execution-only settings; excluded from the provenance embedded in outputs
EXECUTION_KEYS = {("run", "workers"), ("run", "out")}


@dataclass
class RunConfig:
    values: dict

    def __getitem__(self, key: str):
        section, _, name = key.partition(".")
        return self.values[section][name]

    @property
    def preset(self) -> Preset | None:
        name = self["model.preset"]
        return None if name in ("", "none") else get_preset(name)

    @property
    def nu(self) -> float:
        return ghz_to_rad_per_ns(self["model.nu_ghz"])

    @property
    def delta_omega(self) -> float:
        return ghz_to_rad_per_ns(self["model.delta_omega_ghz"])

    @property
    def J(self) -> float:
        return ghz_to_rad_per_ns(self["model.J_ghz"])

    @property
    def tau0(self) -> float:
        return self["model.tau0_ns"]

    @property
    def seed(self) -> int:
        return self["run.seed"]

    @property
    def workers(self) -> int:
        return self["run.workers"] or (os.cpu_count() or 1)

    def two_qubit_params(self) -> TwoQubitParams:
        return TwoQubitParams(self.nu, self.delta_omega, self.J)

    def noise_spec(self) -> NoiseSpec:
        s0, s1 = self["noise.sigma0"], self["noise.sigma1"]
        channels = self["noise.channels"]
        if channels in ("drive", "none"):
            s0 = 0.0
        if channels in ("detuning", "none"):
            s1 = 0.0
        relative = self["noise.mode"] == "relative"
        if not relative:
            s0, s1 = ghz_to_rad_per_ns(s0), ghz_to_rad_per_ns(s1)
        return NoiseSpec(s0, s1, self.seed, relative)

    def provenance(self) -> dict:
        """Resolved configuration without execution-only settings."""
        return {
            sec: {k: v for k, v in items.items() if (sec, k) not in EXECUTION_KEYS}
            for sec, items in self.values.items()
        }


def _parse(section, key, raw):
    try:
        parser, _ = SCHEMA[section][key]
    except KeyError:
        raise ConfigError(f"unknown configuration key [{section}] {key}") from None
    try:
        return parser(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} ({exc})") from None


def _read_file(path) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from None
    out = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown configuration section [{section}]")
        for key, raw in cp.items(section):
            out.setdefault(section, {})[key] = _parse(section, key, raw)
    return out


def _apply_preset(values: dict) -> None:
    model = values["model"]
    try:
        preset = get_preset(model["preset"]) if model["preset"] not in ("", "none") else None
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    fill = {
        "nu_ghz": "nu_ghz",
        "delta_omega_ghz": "delta_omega_ghz",
        "J_ghz": "J_ghz",
        "omega10_ghz": "omega10_ghz",
        "tau0_ns": "tau0_ns",
    }
    for key, attr in fill.items():
        if model[key] is None:
            if preset is None:
                raise ConfigError(f"[model] {key} is required when no preset is selected")
            model[key] = getattr(preset, attr)


def _validate(values: dict) -> None:
    v = values
    checks = [
        (v["noise"]["mode"] in ("relative", "absolute"), "[noise] mode must be relative or absolute"),
        (v["noise"]["channels"] in NOISE_CHANNELS, f"[noise] channels must be one of {NOISE_CHANNELS}"),
        (v["noise"]["sigma0"] >= 0 and v["noise"]["sigma1"] >= 0, "[noise] sigmas must be >= 0"),
        (v["fidelity"]["n_samples"] >= 1, "[fidelity] n_samples must be >= 1"),
        (v["fidelity"]["grid_points"] >= 1, "[fidelity] grid_points must be >= 1"),
        (0 <= v["fidelity"]["xi_min"] <= v["fidelity"]["xi_max"] < math.pi / 2,
         "[fidelity] need 0 <= xi_min <= xi_max < pi/2"),
        (len(v["fidelity"]["sigma0_list"]) > 0 and min(v["fidelity"]["sigma0_list"]) >= 0,
         "[fidelity] sigma0_list must be a non-empty list of non-negative numbers"),
        (v["fidelity"]["quadrature_steps"] >= 64 and v["fidelity"]["quadrature_steps"] % 2 == 0,
         "[fidelity] quadrature_steps must be even and >= 64"),
        (v["fidelity"]["axis"] in FIDELITY_AXES, f"[fidelity] axis must be one of {FIDELITY_AXES}"),
        (v["oracle"]["steps_per_loop"] >= 0, "[oracle] steps_per_loop must be >= 0 (0 = automatic)"),
        (len(v["oracle"]["larmor_periods"]) > 0 and min(v["oracle"]["larmor_periods"]) > 0,
         "[oracle] larmor_periods must be positive"),
        (v["tomo"]["shots"] >= 0, "[tomo] shots must be >= 0"),
        (v["tomo"]["trials"] >= 1, "[tomo] trials must be >= 1"),
        (v["gate"]["kind"] in GATE_KINDS, f"[gate] kind must be one of {GATE_KINDS}"),
        (0 <= v["run"]["seed"] < 2**64, "[run] seed must be an unsigned 64-bit integer"),
        (v["run"]["workers"] >= 0, "[run] workers must be >= 0"),
        (v["model"]["tau0_ns"] > 0, "[model] tau0_ns must be positive"),
        (v["model"]["nu_ghz"] >= 0, "[model] nu_ghz must be >= 0"),
        (v["model"]["J_ghz"] >= 0, "[model] J_ghz must be >= 0"),
    ]
    for ok, message in checks:
        if not ok:
            raise ConfigError(message)


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Build a validated :class:`RunConfig`.

    ``overrides`` maps ``"section.key"`` to raw (string or typed) values.
    """
    values = {sec: {k: (list(d) if isinstance(d, list) else d) for k, (_, d) in keys.items()}
              for sec, keys in SCHEMA.items()}
    if path is not None:
        for sec, items in _read_file(path).items():
            values[sec].update(items)
    for dotted, raw in (overrides or {}).items():
        section, sep, key = dotted.partition(".")
        if not sep or section not in SCHEMA:
            raise ConfigError(f"override {dotted!r} must look like section.key")
        values[section][key] = _parse(section, key, raw)
    _apply_preset(values)
    _validate(values)
    return RunConfig(values)
