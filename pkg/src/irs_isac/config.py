"""Scenario files: a flat INI format with automatic dB conversion.

Keys ending in ``_db`` are read as decibels and stored linear under the bare
name (``beta0_db = -30`` gives ``beta0 = 1e-3``). Keys ending in ``_dbm``
are decibel-milliwatts and become watts. Example::

    [arrays]
    num_rx_antennas = 10
    num_irs_elements = 100

    [radio]
    P_A = 0.1
    sigma_s2_dbm = -80
    sigma_c2_dbm = -80

    [scenario]
    gamma_th_db = 30
    beta0_db = -30

    [vehicles]
    positions = -50,-20,0; -45,-20,0; -40,-20,0
    speeds = 15, 15, 15
"""

from __future__ import annotations

import configparser
import math
from pathlib import Path

from .channel_geometry import ArrayConfig
from .closed_form import RadioConstants
from .errors import ConfigError, IsacError
from .kinematics import ProcessNoise
from .protocol_sim import ScenarioConfig

_SECTIONS = {
    "arrays": {"num_rx_antennas": int, "num_irs_elements": int},
    "radio": {"P_A": float, "W": float, "sigma_s2": float, "sigma_c2": float, "sigmaR2": float},
    "noise": {"var_phi": float, "var_d": float, "var_v": float},
    "scenario": {
        "gamma_th": float,
        "epsilon": float,
        "max_iters": int,
        "dt": float,
        "n_frames": int,
        "beta0": float,
        "d_u": float,
        "phi_user": float,
        "seed": int,
        "random_phase_draws": int,
    },
    "rsu": {"position": "vec3"},
    "vehicles": {"positions": "vec3list", "speeds": "floatlist"},
}


def _linear(key: str, raw: str) -> tuple[str, str | float]:
    low = key.lower()
    if low.endswith("_dbm"):
        return key[:-4], 10.0 ** (float(raw) / 10.0) / 1000.0
    if low.endswith("_db"):
        return key[:-3], 10.0 ** (float(raw) / 10.0)
    return key, raw


def _floats(raw: str) -> tuple[float, ...]:
    return tuple(float(x) for x in raw.replace(",", " ").split())


def _parse(kind, raw, where: str):
    try:
        if kind == "vec3":
            v = _floats(raw)
            if len(v) != 3:
                raise ValueError("need three coordinates")
            return v
        if kind == "vec3list":
            out = tuple(_parse("vec3", part, where) for part in raw.split(";") if part.strip())
            if not out:
                raise ValueError("empty list")
            return out
        if kind == "floatlist":
            return _floats(raw)
        if kind is int:
            val = float(raw)
            if val != int(val):
                raise ValueError("not an integer")
            return int(val)
        val = float(raw)
        if not math.isfinite(val):
            raise ValueError("not finite")
        return val
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} ({exc})") from None


def read_values(text: str, source: str = "<string>") -> dict[str, dict]:
    """Parse INI text into typed, linear values per section."""
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keep key case (P_A, sigmaR2)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    out: dict[str, dict] = {}
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"{source}: unknown section [{section}]")
        known = _SECTIONS[section]
        vals = {}
        for key, raw in cp.items(section):
            name, value = _linear(key, raw)
            if name not in known:
                raise ConfigError(f"{source}: unknown key {key!r} in [{section}]")
            where = f"{source} [{section}] {key}"
            if isinstance(value, float):
                if known[name] is int:
                    raise ConfigError(f"{where}: dB value for an integer key")
                vals[name] = value
            else:
                vals[name] = _parse(known[name], value, where)
        out[section] = vals
    return out


def config_from_values(values: dict[str, dict], base: ScenarioConfig | None = None) -> ScenarioConfig:
    base = base or ScenarioConfig()
    try:
        arrays = ArrayConfig(**{**vars(base.arrays), **values.get("arrays", {})})
        radio = RadioConstants(**{**vars(base.radio), **values.get("radio", {})})
        noise = ProcessNoise(**{**vars(base.noise), **values.get("noise", {})})
        kw = dict(values.get("scenario", {}))
        if "position" in values.get("rsu", {}):
            kw["rsu_position"] = values["rsu"]["position"]
        veh = values.get("vehicles", {})
        if "positions" in veh:
            kw["vehicle_positions"] = veh["positions"]
            if "speeds" not in veh:
                kw["speeds"] = (base.speeds[0],) * len(veh["positions"])
        if "speeds" in veh:
            kw["speeds"] = veh["speeds"]
        return base.replace(arrays=arrays, radio=radio, noise=noise, **kw)
    except IsacError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ScenarioConfig:
    """Read a scenario file; every problem is reported as :class:`ConfigError`."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return config_from_values(read_values(text, str(path)))


def dump_config(cfg: ScenarioConfig) -> str:
    """Render a config in the same format (linear values, no dB keys)."""
    lines = ["[arrays]"]
    lines += [f"num_rx_antennas = {cfg.arrays.num_rx_antennas}",
              f"num_irs_elements = {cfg.arrays.num_irs_elements}", "", "[radio]"]
    lines += [f"{k} = {v!r}" for k, v in vars(cfg.radio).items()]
    lines += ["", "[noise]"] + [f"{k} = {v!r}" for k, v in vars(cfg.noise).items()]
    lines += ["", "[scenario]"]
    for k in _SECTIONS["scenario"]:
        lines.append(f"{k} = {getattr(cfg, k)!r}")
    lines += ["", "[rsu]", "position = " + ", ".join(repr(x) for x in cfg.rsu_position)]
    lines += ["", "[vehicles]",
              "positions = " + "; ".join(", ".join(repr(x) for x in p) for p in cfg.vehicle_positions),
              "speeds = " + ", ".join(repr(s) for s in cfg.speeds), ""]
    return "\n".join(lines)
