"""Static data model: hardware, models, services, network and economic parameters.

Everything here is immutable after validation and safe to share across
concurrent tasks. Configurations are loaded from a single JSON document with
top-level keys ``hardware``, ``models``, ``services`` and ``economics``;
unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping

DEFAULT_BITS_PER_PIXEL = 6.0
DEFAULT_OUTPUT_SIZE_BITS = 32768  # 4 KB detector output; small next to any input


class ConfigError(Exception):
    """Base class for configuration problems."""


class ConfigParseError(ConfigError):
    """The configuration file could not be read or is not valid JSON."""


class ConfigValidationError(ConfigError):
    """A configuration value violates a documented invariant."""


class DanglingReferenceError(ConfigValidationError):
    """A configuration entry references an id that is not defined."""


class Location(str, Enum):
    """Where a hardware profile physically lives."""

    ON_VEHICLE = "on_vehicle"
    CLOUD = "cloud"


@dataclass(frozen=True)
class HardwareProfile:
    """An execution target: an on-vehicle accelerator or a rented cloud GPU."""

    id: str
    location: Location
    hourly_cost_usd: float = 0.0
    purchase_cost_usd: float | None = None


@dataclass(frozen=True)
class ModelProfile:
    """One inference model: accuracy, input geometry and per-hardware runtimes.

    ``bits_per_pixel`` calibrates the on-the-wire size of one input frame
    (compressed sensor data, not raw RGB). ``output_size_bits`` is carried for
    accounting only; result downloads are never part of the latency math
    because downlink is roughly an order of magnitude faster than uplink.
    """

    id: str
    accuracy: float
    input_width: int
    input_height: int
    exec_time_ms: dict[str, float] = field(default_factory=dict)
    bits_per_pixel: float = DEFAULT_BITS_PER_PIXEL
    output_size_bits: int = DEFAULT_OUTPUT_SIZE_BITS


@dataclass(frozen=True)
class ModelOption:
    """A (model, hardware) pairing a service may run."""

    model: ModelProfile
    hardware: HardwareProfile

    @property
    def id(self) -> str:
        return f"{self.model.id}@{self.hardware.id}"


@dataclass(frozen=True)
class ServiceSpec:
    """One pipeline service: a latency deadline, a guaranteed local model and
    an optional menu of more accurate remote models."""

    name: str
    slo_ms: float
    local_option: ModelOption
    remote_options: tuple[ModelOption, ...] = ()

    def options(self) -> tuple[ModelOption, ...]:
        return (self.local_option, *self.remote_options)

    def option_by_id(self, option_id: str) -> ModelOption:
        for opt in self.options():
            if opt.id == option_id:
                return opt
        raise KeyError(f"service {self.name!r} has no option {option_id!r}")


@dataclass(frozen=True)
class NetworkConditions:
    """Uplink bandwidth and round-trip time at an instant."""

    uplink_mbps: float
    rtt_ms: float

    def __post_init__(self) -> None:
        if self.uplink_mbps <= 0:
            raise ValueError(f"uplink_mbps must be positive, got {self.uplink_mbps}")
        if self.rtt_ms < 0:
            raise ValueError(f"rtt_ms must be nonnegative, got {self.rtt_ms}")


@dataclass(frozen=True)
class EconomicParams:
    """Network pricing and vehicle duty cycle. 1 GB is decimal (10^9 bytes)."""

    network_price_usd_per_gb: float
    utilization_fraction: float


@dataclass(frozen=True)
class Configuration:
    """A validated bundle of profiles with all cross-references resolved."""

    hardware: tuple[HardwareProfile, ...]
    models: tuple[ModelProfile, ...]
    services: tuple[ServiceSpec, ...]
    economics: EconomicParams

    def hardware_by_id(self, hardware_id: str) -> HardwareProfile:
        for hw in self.hardware:
            if hw.id == hardware_id:
                return hw
        raise KeyError(f"unknown hardware id {hardware_id!r}")

    def model_by_id(self, model_id: str) -> ModelProfile:
        for model in self.models:
            if model.id == model_id:
                return model
        raise KeyError(f"unknown model id {model_id!r}")

    def service_by_name(self, name: str) -> ServiceSpec:
        for svc in self.services:
            if svc.name == name:
                return svc
        raise KeyError(f"unknown service {name!r}")


def payload_bits(model: ModelProfile) -> int:
    """Uplink payload for one input frame, rounded up to whole bits."""
    return math.ceil(model.input_width * model.input_height * model.bits_per_pixel)


# ---------------------------------------------------------------------------
# Loading and validation

_TOP_KEYS = {"hardware", "models", "services", "economics"}
_HARDWARE_KEYS = {"id", "location", "hourly_cost_usd", "purchase_cost_usd"}
_MODEL_KEYS = {
    "id",
    "accuracy",
    "input_width",
    "input_height",
    "exec_time_ms",
    "bits_per_pixel",
    "output_size_bits",
}
_SERVICE_KEYS = {"name", "slo_ms", "local_option", "remote_options"}
_OPTION_KEYS = {"model", "hardware"}
_ECONOMICS_KEYS = {"network_price_usd_per_gb", "utilization_fraction"}


def _reject_unknown_keys(obj: Mapping[str, Any], allowed: set[str], where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigValidationError(f"{where}: unknown key(s) {unknown}")


def _require(obj: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in obj:
        raise ConfigValidationError(f"{where}: missing required key {key!r}")
    return obj[key]


def _as_str(value: Any, where: str) -> str:
    if not isinstance(value, str) or not value:
        raise ConfigValidationError(f"{where}: expected a non-empty string, got {value!r}")
    return value


def _as_number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValidationError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _as_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigValidationError(f"{where}: expected an integer, got {value!r}")
    return value


def _parse_hardware(entries: Any) -> tuple[HardwareProfile, ...]:
    if not isinstance(entries, list):
        raise ConfigValidationError("hardware: expected a list")
    profiles: list[HardwareProfile] = []
    seen: set[str] = set()
    for entry in entries:
        if not isinstance(entry, dict):
            raise ConfigValidationError("hardware: entries must be objects")
        hw_id = _as_str(_require(entry, "id", "hardware"), "hardware.id")
        where = f"hardware {hw_id!r}"
        _reject_unknown_keys(entry, _HARDWARE_KEYS, where)
        if hw_id in seen:
            raise ConfigValidationError(f"{where}: duplicate id")
        seen.add(hw_id)
        raw_location = _as_str(_require(entry, "location", where), f"{where}.location")
        try:
            location = Location(raw_location)
        except ValueError:
            raise ConfigValidationError(
                f"{where}: location must be one of "
                f"{[loc.value for loc in Location]}, got {raw_location!r}"
            ) from None
        hourly = _as_number(entry.get("hourly_cost_usd", 0.0), f"{where}.hourly_cost_usd")
        if hourly < 0:
            raise ConfigValidationError(f"{where}: hourly_cost_usd must be >= 0")
        purchase = entry.get("purchase_cost_usd")
        if purchase is not None:
            purchase = _as_number(purchase, f"{where}.purchase_cost_usd")
            if purchase <= 0:
                raise ConfigValidationError(f"{where}: purchase_cost_usd must be > 0")
        profiles.append(HardwareProfile(hw_id, location, hourly, purchase))
    return tuple(profiles)


def _parse_models(entries: Any, hardware_ids: set[str]) -> tuple[ModelProfile, ...]:
    if not isinstance(entries, list):
        raise ConfigValidationError("models: expected a list")
    models: list[ModelProfile] = []
    seen: set[str] = set()
    for entry in entries:
        if not isinstance(entry, dict):
            raise ConfigValidationError("models: entries must be objects")
        model_id = _as_str(_require(entry, "id", "models"), "models.id")
        where = f"model {model_id!r}"
        _reject_unknown_keys(entry, _MODEL_KEYS, where)
        if model_id in seen:
            raise ConfigValidationError(f"{where}: duplicate id")
        seen.add(model_id)
        accuracy = _as_number(_require(entry, "accuracy", where), f"{where}.accuracy")
        if not 0.0 <= accuracy <= 100.0:
            raise ConfigValidationError(f"{where}: accuracy must be within [0, 100]")
        width = _as_int(_require(entry, "input_width", where), f"{where}.input_width")
        height = _as_int(_require(entry, "input_height", where), f"{where}.input_height")
        if width <= 0 or height <= 0:
            raise ConfigValidationError(f"{where}: input dimensions must be positive")
        bpp = _as_number(entry.get("bits_per_pixel", DEFAULT_BITS_PER_PIXEL), f"{where}.bits_per_pixel")
        if bpp <= 0:
            raise ConfigValidationError(f"{where}: bits_per_pixel must be positive")
        out_bits = _as_int(
            entry.get("output_size_bits", DEFAULT_OUTPUT_SIZE_BITS), f"{where}.output_size_bits"
        )
        if out_bits < 0:
            raise ConfigValidationError(f"{where}: output_size_bits must be >= 0")
        raw_exec = _require(entry, "exec_time_ms", where)
        if not isinstance(raw_exec, dict) or not raw_exec:
            raise ConfigValidationError(f"{where}: exec_time_ms must be a non-empty object")
        exec_times: dict[str, float] = {}
        for hw_id, ms in raw_exec.items():
            if hw_id not in hardware_ids:
                raise DanglingReferenceError(
                    f"{where}: exec_time_ms references unknown hardware {hw_id!r}"
                )
            ms = _as_number(ms, f"{where}.exec_time_ms[{hw_id!r}]")
            if ms <= 0:
                raise ConfigValidationError(f"{where}: exec_time_ms[{hw_id!r}] must be positive")
            exec_times[hw_id] = ms
        models.append(ModelProfile(model_id, accuracy, width, height, exec_times, bpp, out_bits))
    return tuple(models)


def _parse_option(entry: Any, config_view: Configuration, where: str) -> ModelOption:
    if not isinstance(entry, dict):
        raise ConfigValidationError(f"{where}: expected an object with 'model' and 'hardware'")
    _reject_unknown_keys(entry, _OPTION_KEYS, where)
    model_id = _as_str(_require(entry, "model", where), f"{where}.model")
    hw_id = _as_str(_require(entry, "hardware", where), f"{where}.hardware")
    try:
        model = config_view.model_by_id(model_id)
    except KeyError:
        raise DanglingReferenceError(f"{where}: references unknown model {model_id!r}") from None
    try:
        hardware = config_view.hardware_by_id(hw_id)
    except KeyError:
        raise DanglingReferenceError(f"{where}: references unknown hardware {hw_id!r}") from None
    if hw_id not in model.exec_time_ms:
        raise ConfigValidationError(
            f"{where}: model {model_id!r} has no exec_time_ms entry for hardware {hw_id!r}"
        )
    return ModelOption(model, hardware)


def _parse_services(entries: Any, config_view: Configuration) -> tuple[ServiceSpec, ...]:
    if not isinstance(entries, list):
        raise ConfigValidationError("services: expected a list")
    services: list[ServiceSpec] = []
    seen: set[str] = set()
    for entry in entries:
        if not isinstance(entry, dict):
            raise ConfigValidationError("services: entries must be objects")
        name = _as_str(_require(entry, "name", "services"), "services.name")
        where = f"service {name!r}"
        _reject_unknown_keys(entry, _SERVICE_KEYS, where)
        if name in seen:
            raise ConfigValidationError(f"{where}: duplicate name")
        seen.add(name)
        slo = _as_number(_require(entry, "slo_ms", where), f"{where}.slo_ms")
        if slo <= 0:
            raise ConfigValidationError(f"{where}: slo_ms must be positive")
        local = _parse_option(_require(entry, "local_option", where), config_view, f"{where}.local_option")
        if local.hardware.location is not Location.ON_VEHICLE:
            raise ConfigValidationError(f"{where}: local option must use on-vehicle hardware")
        local_exec = local.model.exec_time_ms[local.hardware.id]
        if local_exec > slo:
            raise ConfigValidationError(
                f"{where}: local option violates SLO "
                f"(exec {local_exec} ms > slo_ms {slo} ms)"
            )
        remotes: list[ModelOption] = []
        for i, raw in enumerate(entry.get("remote_options", [])):
            opt = _parse_option(raw, config_view, f"{where}.remote_options[{i}]")
            if opt.hardware.location is not Location.CLOUD:
                raise ConfigValidationError(
                    f"{where}.remote_options[{i}]: remote option must use cloud hardware"
                )
            remotes.append(opt)
        services.append(ServiceSpec(name, slo, local, tuple(remotes)))
    return tuple(services)


def _parse_economics(entry: Any) -> EconomicParams:
    if not isinstance(entry, dict):
        raise ConfigValidationError("economics: expected an object")
    _reject_unknown_keys(entry, _ECONOMICS_KEYS, "economics")
    price = _as_number(
        _require(entry, "network_price_usd_per_gb", "economics"), "economics.network_price_usd_per_gb"
    )
    if price < 0:
        raise ConfigValidationError("economics: network_price_usd_per_gb must be >= 0")
    utilization = _as_number(
        _require(entry, "utilization_fraction", "economics"), "economics.utilization_fraction"
    )
    if not 0.0 < utilization <= 1.0:
        raise ConfigValidationError("economics: utilization_fraction must be in (0, 1]")
    return EconomicParams(price, utilization)


def load_config_dict(data: Mapping[str, Any]) -> Configuration:
    """Validate an already-parsed configuration document."""
    if not isinstance(data, Mapping):
        raise ConfigValidationError("configuration root must be an object")
    _reject_unknown_keys(data, _TOP_KEYS, "configuration")
    for key in _TOP_KEYS:
        _require(data, key, "configuration")
    hardware = _parse_hardware(data["hardware"])
    models = _parse_models(data["models"], {hw.id for hw in hardware})
    economics = _parse_economics(data["economics"])
    partial = Configuration(hardware, models, (), economics)
    services = _parse_services(data["services"], partial)
    return Configuration(hardware, models, services, economics)


def load_config(path: str | Path) -> Configuration:
    """Load and validate a configuration file.

    Raises ConfigParseError for unreadable or malformed files and
    ConfigValidationError (or DanglingReferenceError) for invariant
    violations; messages name the offending id.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{path}: invalid JSON: {exc}") from exc
    return load_config_dict(data)


def serialize_config(config: Configuration) -> dict[str, Any]:
    """Render a configuration back to its JSON document form.

    Loading the result reproduces the configuration exactly (round-trip
    identity on validated configurations).
    """

    def option(opt: ModelOption) -> dict[str, str]:
        return {"model": opt.model.id, "hardware": opt.hardware.id}

    hardware: list[dict[str, Any]] = []
    for hw in config.hardware:
        entry: dict[str, Any] = {
            "id": hw.id,
            "location": hw.location.value,
            "hourly_cost_usd": hw.hourly_cost_usd,
        }
        if hw.purchase_cost_usd is not None:
            entry["purchase_cost_usd"] = hw.purchase_cost_usd
        hardware.append(entry)
    return {
        "hardware": hardware,
        "models": [
            {
                "id": m.id,
                "accuracy": m.accuracy,
                "input_width": m.input_width,
                "input_height": m.input_height,
                "exec_time_ms": dict(m.exec_time_ms),
                "bits_per_pixel": m.bits_per_pixel,
                "output_size_bits": m.output_size_bits,
            }
            for m in config.models
        ],
        "services": [
            {
                "name": svc.name,
                "slo_ms": svc.slo_ms,
                "local_option": option(svc.local_option),
                "remote_options": [option(opt) for opt in svc.remote_options],
            }
            for svc in config.services
        ],
        "economics": {
            "network_price_usd_per_gb": config.economics.network_price_usd_per_gb,
            "utilization_fraction": config.economics.utilization_fraction,
        },
    }
