"""Flat key = value run configuration.

One assignment per line, '#' starts a comment, unknown or duplicate keys
are rejected, and every referenced file plus every derived parameter
object is validated at load time so that a bad configuration fails before
any simulation starts.  Relative paths resolve against the config file's
directory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .device import DeviceIVTable, IVParseError, load_iv_table
from .learning import StdpParams, SupervisionMode
from .network import InhibitionMode, InputMode, NetworkConfig
from .neuron import NeuronParams


class ConfigError(ValueError):
    pass


def bundled_data_path(name: str) -> Path:
    """Path of a data file shipped inside the package."""
    path = Path(str(resources.files("btlif").joinpath("data", name)))
    if not path.exists():
        raise FileNotFoundError(f"no bundled data file {name!r}")
    return path


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_enum(enum_cls):
    def parse(text: str):
        try:
            return enum_cls(text.strip().lower())
        except ValueError:
            choices = ", ".join(e.value for e in enum_cls)
            raise ValueError(f"must be one of: {choices}") from None
    return parse


def _parse_str(text: str) -> str:
    return text


# key -> (parser, default)
_SCHEMA = {
    "leak_resistance": (_parse_float, 1e9),
    "membrane_capacitance": (_parse_float, 1e-12),
    "resting_potential": (_parse_float, 0.0),
    "firing_threshold": (_parse_float, 0.25),
    "refractory_time": (_parse_float, 0.0),
    "iv_table": (_parse_str, None),
    "input_count": (_parse_int, 16),
    "output_count": (_parse_int, 3),
    "inhibition_mode": (_parse_enum(InhibitionMode), InhibitionMode.HARD_RESET),
    "inhibition_strength": (_parse_float, 0.0),
    "input_mode": (_parse_enum(InputMode), InputMode.LIF),
    "dt": (_parse_float, 1e-5),
    "duration": (_parse_float, 0.015),
    "a_plus": (_parse_float, 1.0),
    "a_minus": (_parse_float, 0.5),
    "tau_plus": (_parse_float, 5e-3),
    "learning_rate": (_parse_float, 0.01),
    "supervision_mode": (_parse_enum(SupervisionMode), SupervisionMode.TARGET_AND_RIVAL),
    "w_min": (_parse_float, 0.0),
    "w_max": (_parse_float, 1.0),
    "current_scale": (_parse_float, 5e-9),
    "init_weight_high": (_parse_float, 0.1),
    "i_max": (_parse_float, 7.5e-10),
    "sigma": (_parse_float, 0.125),
    "seed": (_parse_int, 42),
    "epochs": (_parse_int, 30),
    "out_dir": (_parse_str, "out"),
}


@dataclass(frozen=True)
class RunConfig:
    neuron_params: NeuronParams
    network: NetworkConfig
    stdp: StdpParams
    iv_table_path: Path | None
    iv_table: DeviceIVTable | None
    w_min: float
    w_max: float
    current_scale: float
    init_weight_high: float
    i_max: float
    sigma: float
    seed: int
    epochs: int
    out_dir: Path

    def require_iv_table(self) -> DeviceIVTable:
        if self.iv_table is None:
            raise ConfigError("this command needs an IV table; set iv_table = <path>")
        return self.iv_table


def _read_assignments(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _SCHEMA:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if key in values:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            if not value:
                raise ConfigError(f"{path}:{lineno}: empty value for {key!r}")
            values[key] = value
    return values


def load_config(path, *, seed: int | None = None, out_dir: str | None = None) -> RunConfig:
    """Parse and fully validate a config file; optional seed/out_dir overrides."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    raw = _read_assignments(path)

    parsed: dict[str, object] = {}
    for key, (parser, default) in _SCHEMA.items():
        if key in raw:
            try:
                parsed[key] = parser(raw[key])
            except ValueError as exc:
                raise ConfigError(f"{path}: {key}: {exc}") from None
        else:
            parsed[key] = default
    if seed is not None:
        parsed["seed"] = seed
    if out_dir is not None:
        parsed["out_dir"] = out_dir

    def build(context, ctor, **kwargs):
        try:
            return ctor(**kwargs)
        except ValueError as exc:
            raise ConfigError(f"{path}: {context}: {exc}") from None

    neuron = build("neuron parameters", NeuronParams,
                   leak_resistance=parsed["leak_resistance"],
                   membrane_capacitance=parsed["membrane_capacitance"],
                   resting_potential=parsed["resting_potential"],
                   firing_threshold=parsed["firing_threshold"],
                   refractory_time=parsed["refractory_time"])
    network = build("network settings", NetworkConfig,
                    neuron_params=neuron,
                    dt=parsed["dt"],
                    duration=parsed["duration"],
                    input_count=parsed["input_count"],
                    output_count=parsed["output_count"],
                    inhibition_mode=parsed["inhibition_mode"],
                    inhibition_strength=parsed["inhibition_strength"],
                    input_mode=parsed["input_mode"])
    stdp = build("stdp parameters", StdpParams,
                 a_plus=parsed["a_plus"],
                 a_minus=parsed["a_minus"],
                 tau_plus=parsed["tau_plus"],
                 learning_rate=parsed["learning_rate"],
                 supervision_mode=parsed["supervision_mode"])

    iv_path = None
    iv_table = None
    if parsed["iv_table"] is not None:
        iv_path = Path(str(parsed["iv_table"]))
        if not iv_path.is_absolute():
            iv_path = path.parent / iv_path
        if not iv_path.exists():
            raise ConfigError(f"{path}: iv_table: file {iv_path} does not exist")
        try:
            iv_table = load_iv_table(iv_path)
        except IVParseError as exc:
            raise ConfigError(f"{path}: iv_table: {iv_path}: {exc}") from None

    for lo_key, hi_key in (("w_min", "w_max"),):
        if not parsed[lo_key] < parsed[hi_key]:
            raise ConfigError(f"{path}: {lo_key}/{hi_key}: need {lo_key} < {hi_key}")
    for key in ("current_scale", "i_max", "sigma"):
        if not parsed[key] > 0.0:
            raise ConfigError(f"{path}: {key}: must be positive")
    if not 0.0 <= parsed["init_weight_high"] <= 1.0:
        raise ConfigError(f"{path}: init_weight_high: must lie in [0, 1]")
    if parsed["i_max"] <= neuron.critical_current:
        raise ConfigError(
            f"{path}: i_max: {parsed['i_max']!r} A is subcritical for these "
            f"neuron parameters (critical current {neuron.critical_current!r} A)")
    if parsed["epochs"] < 1:
        raise ConfigError(f"{path}: epochs: must be >= 1")
    if parsed["seed"] < 0:
        raise ConfigError(f"{path}: seed: must be >= 0")

    return RunConfig(
        neuron_params=neuron,
        network=network,
        stdp=stdp,
        iv_table_path=iv_path,
        iv_table=iv_table,
        w_min=parsed["w_min"],
        w_max=parsed["w_max"],
        current_scale=parsed["current_scale"],
        init_weight_high=parsed["init_weight_high"],
        i_max=parsed["i_max"],
        sigma=parsed["sigma"],
        seed=parsed["seed"],
        epochs=parsed["epochs"],
        out_dir=Path(str(parsed["out_dir"])),
    )
