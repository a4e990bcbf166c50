"""Scenario files: sectioned key-value text with explicit unit suffixes.

Every physical quantity carries a unit suffix ("500 km", "0.41 urad"); values
are converted to SI at parse time.  Unknown sections or keys are rejected so
typos in physics parameters cannot pass silently.  `serialize` emits the
normalized (SI, sorted) form; parse -> serialize -> parse is the identity on
that form.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import math
from dataclasses import dataclass, field

from . import geometry as geo
from . import link_budget as lb
from . import quantum as qm
from . import rate as rt
from .errors import ScenarioError

_UNITS = {
    "length": {"m": 1.0, "km": 1e3, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "min": 60.0},
    "angle": {"rad": 1.0, "mrad": 1e-3, "urad": 1e-6, "deg": math.pi / 180.0},
    "rate": {"hz": 1.0, "khz": 1e3},
}


def _parse_quantity(raw: str, dimension: str, context: str) -> float:
    parts = raw.strip().split()
    if dimension == "none":
        if len(parts) != 1:
            raise ScenarioError(f"{context}: expected a bare number, got {raw!r}")
        try:
            return float(parts[0])
        except ValueError as exc:
            raise ScenarioError(f"{context}: not a number: {raw!r}") from exc
    table = _UNITS[dimension]
    if len(parts) != 2:
        raise ScenarioError(
            f"{context}: expected '<value> <unit>' with unit in {sorted(table)}, got {raw!r}"
        )
    try:
        value = float(parts[0])
    except ValueError as exc:
        raise ScenarioError(f"{context}: not a number: {parts[0]!r}") from exc
    unit = parts[1].lower() if dimension == "rate" else parts[1]
    if unit not in table:
        raise ScenarioError(f"{context}: unknown {dimension} unit {parts[1]!r}")
    return value * table[unit]


def _parse_bool(raw: str, context: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ScenarioError(f"{context}: expected a boolean, got {raw!r}")


# (dimension, default) per key; default None means required.
_SCHEMA: dict[str, dict[str, tuple[str, object]]] = {
    "chain": {
        "n_sat": ("int", None),
        "orbit_altitude": ("length", None),
        "ground_distance": ("length", None),
        "ground_altitude": ("length", 2_000.0),
        "earth_radius": ("length", geo.EARTH_RADIUS),
        "min_elevation": ("angle", math.radians(20.0)),
    },
    "terminal.satellite": {
        "aperture_radius": ("length", None),
        "pointing_sigma": ("angle", None),
        "internal_transmittance": ("none", 0.9),
        "wavelength": ("length", 780e-9),
        "waist_ratio": ("none", 0.89),
    },
    "terminal.ground": {
        "aperture_radius": ("length", None),
        "pointing_sigma": ("angle", 0.0),
        "internal_transmittance": ("none", 0.9),
        "wavelength": ("length", 780e-9),
        "waist_ratio": ("none", 0.89),
    },
    "hardware.satellite": {
        "p1": ("none", None),
        "p2": ("none", None),
        "eta_coll": ("none", None),
        "visibility": ("none", None),
        "eta_det": ("none", None),
        "p_dark": ("none", None),
        "p_swap": ("none", None),
        "p_loss_swap": ("none", None),
        "tau_c": ("time", None),
        "t_loss": ("time", None),
    },
    "hardware.ground": {
        "p1": ("none", None),
        "p2": ("none", None),
        "eta_coll": ("none", None),
        "visibility": ("none", None),
        "eta_det": ("none", None),
        "p_dark": ("none", None),
        "p_swap": ("none", 1.0),
        "p_loss_swap": ("none", 0.0),
        "tau_c": ("time", None),
        "t_loss": ("time", None),
    },
    "atmosphere": {
        "zenith_transmittance": ("none", 1.0),
        "turbulence_widening": ("none", 1.0),
        "enabled": ("bool", True),
    },
    "run": {
        "n_mem": ("int", 100),
        "n_max": ("int", 100_000),
        "distances": ("length_list", ()),
        "target_rates": ("rate_list", (10.0, 100.0)),
        "target_fidelity": ("none", 0.9),
        "trials": ("int", 100_000),
        "seed": ("int", 1),
        "jitter_mode": ("enum:correlated,independent,off", "correlated"),
        "phase_samples": ("int", 64),
        "swap_duration": ("time", 1e-3),
        "visibility_per_photon": ("bool", False),
    },
}

_DIMENSION_SUFFIX = {
    "length": "m", "time": "s", "angle": "rad", "rate": "Hz",
}


def _parse_value(raw: str, kind: str, context: str):
    if kind == "int":
        try:
            value = int(raw.strip())
        except ValueError as exc:
            raise ScenarioError(f"{context}: expected an integer, got {raw!r}") from exc
        return value
    if kind == "bool":
        return _parse_bool(raw, context)
    if kind.startswith("enum:"):
        options = kind.split(":", 1)[1].split(",")
        value = raw.strip()
        if value not in options:
            raise ScenarioError(f"{context}: expected one of {options}, got {raw!r}")
        return value
    if kind.endswith("_list"):
        base = kind[: -len("_list")]
        items = [part.strip() for part in raw.split(",") if part.strip()]
        return tuple(_parse_quantity(item, base, context) for item in items)
    return _parse_quantity(raw, kind, context)


@dataclass(frozen=True)
class RunParams:
    n_mem: int = 100
    n_max: int = 100_000
    distances: tuple[float, ...] = ()
    target_rates: tuple[float, ...] = (10.0, 100.0)
    target_fidelity: float = 0.9
    trials: int = 100_000
    seed: int = 1
    jitter_mode: str = "correlated"
    phase_samples: int = 64
    swap_duration: float = 1e-3
    visibility_per_photon: bool = False


@dataclass(frozen=True)
class ScenarioFile:
    values: dict[str, dict[str, object]]
    defaults_used: tuple[str, ...] = field(default_factory=tuple)

    def run_params(self) -> RunParams:
        run = self.values["run"]
        return RunParams(**{k: run[k] for k in RunParams.__dataclass_fields__})

    def chain_config(self, ground_distance: float | None = None) -> rt.ChainConfig:
        v = self.values
        chain = dict(v["chain"])
        if ground_distance is not None:
            chain["ground_distance"] = ground_distance
        run = self.run_params()

        def terminal(section: str) -> lb.TerminalSpec:
            return lb.TerminalSpec(**v[section])

        def hardware(section: str) -> qm.HardwareParams:
            return qm.HardwareParams(**v[section])

        return rt.ChainConfig(
            constellation=geo.ConstellationSpec(**chain),
            sat_terminal=terminal("terminal.satellite"),
            ground_terminal=terminal("terminal.ground"),
            sat_hardware=hardware("hardware.satellite"),
            ground_hardware=hardware("hardware.ground"),
            atmosphere=lb.AtmosphereSpec(**v["atmosphere"]),
            swap_duration=run.swap_duration,
            phase_samples=run.phase_samples,
            visibility_per_photon=run.visibility_per_photon,
        )


def parse_scenario_text(
    text: str,
    origin: str = "<string>",
    overrides: list[str] | None = None,
) -> ScenarioFile:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ScenarioError(f"{origin}: {exc}") from exc

    for override in overrides or []:
        if "=" not in override:
            raise ScenarioError(f"override {override!r} must look like section.key=value")
        target, raw = override.split("=", 1)
        if "." not in target:
            raise ScenarioError(f"override target {target!r} must look like section.key")
        section, key = target.strip().rsplit(".", 1)
        # bare "hardware" / "terminal" targets fan out to both node classes
        sections = [section]
        if section in ("hardware", "terminal"):
            sections = [f"{section}.satellite", f"{section}.ground"]
        for name in sections:
            if not parser.has_section(name):
                parser.add_section(name)
            parser.set(name, key, raw.strip())

    unknown_sections = set(parser.sections()) - set(_SCHEMA)
    if unknown_sections:
        raise ScenarioError(f"{origin}: unknown sections {sorted(unknown_sections)}")
    missing_sections = [s for s in _SCHEMA if s not in parser.sections()]
    if missing_sections:
        raise ScenarioError(f"{origin}: missing required sections {missing_sections}")

    values: dict[str, dict[str, object]] = {}
    defaults_used: list[str] = []
    for section, keys in _SCHEMA.items():
        section_values: dict[str, object] = {}
        present = dict(parser.items(section))
        unknown_keys = set(present) - set(keys)
        if unknown_keys:
            raise ScenarioError(f"{origin}: [{section}] unknown keys {sorted(unknown_keys)}")
        for key, (kind, default) in keys.items():
            context = f"{origin}: [{section}] {key}"
            if key in present:
                section_values[key] = _parse_value(present[key], kind, context)
            elif default is not None or kind == "bool":
                section_values[key] = default
                defaults_used.append(f"{section}.{key}")
            else:
                raise ScenarioError(f"{context}: required key is missing")
        values[section] = section_values
    scenario = ScenarioFile(values=values, defaults_used=tuple(sorted(defaults_used)))
    scenario.chain_config()  # validate eagerly, with invariant errors named
    return scenario


def parse_scenario(path, overrides: list[str] | None = None) -> ScenarioFile:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    return parse_scenario_text(text, origin=str(path), overrides=overrides)


def _format_value(value: object, kind: str) -> str:
    if kind == "int":
        return str(value)
    if kind == "bool":
        return "true" if value else "false"
    if kind.startswith("enum:"):
        return str(value)
    # repr is the shortest string that round-trips the float exactly
    if kind.endswith("_list"):
        base = kind[: -len("_list")]
        suffix = _DIMENSION_SUFFIX.get(base, "")
        return ", ".join(f"{v!r} {suffix}".strip() for v in value)
    if kind == "none":
        return repr(value)
    return f"{value!r} {_DIMENSION_SUFFIX[kind]}"


def serialize(scenario: ScenarioFile) -> str:
    out = io.StringIO()
    for section in _SCHEMA:
        out.write(f"[{section}]\n")
        for key, (kind, _) in _SCHEMA[section].items():
            value = scenario.values[section][key]
            if kind.endswith("_list") and not value:
                continue
            out.write(f"{key} = {_format_value(value, kind)}\n")
        out.write("\n")
    return out.getvalue()


def scenario_hash(scenario: ScenarioFile) -> str:
    return hashlib.sha256(serialize(scenario).encode("utf-8")).hexdigest()[:12]
