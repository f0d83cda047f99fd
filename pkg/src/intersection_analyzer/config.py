"""Configuration loading and defaults.

Precedence is defaults < config file < CLI flags.  A config file replaces
whole top-level sections of the defaults; keys it does not mention keep
their default values.  With no ``--config`` flag, ``ANALYZER_CONFIG_DIR``
is consulted for a ``config.json`` fallback.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .errors import AnalyzerError, ConfigError
from .flow import CapacityTable
from .emissions import EmissionFactorTable, FuelType, IdleRate, IdleRateTable
from .los import LosBandTable
from .model import Directionality, VehicleClass
from .pcu import PcuFactorTable

ENV_CONFIG_DIR = "ANALYZER_CONFIG_DIR"
_FALLBACK_NAME = "config.json"

COUNTS_PCU = "pcu"
COUNTS_VEHICLES = "vehicles"


@dataclass(frozen=True)
class CityScaling:
    intersection_count: int
    active_hours_per_day: float
    co2_kg_per_hour: float | None


@dataclass(frozen=True)
class AnalysisConfig:
    """Every lookup table and constant the pipeline treats as given."""

    version: int
    counts_unit: str
    pcu_factors: PcuFactorTable
    capacity_table: CapacityTable
    los_tables: Mapping[str, LosBandTable]
    emission_factors: EmissionFactorTable
    idle_rates: IdleRateTable
    platoon_ratios: Mapping[str, float] = field(default_factory=dict)
    default_platoon_ratio: float = 1.0
    city: CityScaling = CityScaling(1, 13.0, None)

    def platoon_ratio_for(self, approach_id: str) -> float:
        return self.platoon_ratios.get(approach_id, self.default_platoon_ratio)


def _strip_notes(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _strip_notes(v) for k, v in value.items() if not k.startswith("_")}
    if isinstance(value, list):
        return [_strip_notes(v) for v in value]
    return value


def _finite(value: Any, label: str) -> float:
    number = float(value)
    if not math.isfinite(number):
        raise ConfigError(f"{label} must be finite, got {value!r}")
    return number


def _build_pcu(section: Mapping[str, Any]) -> PcuFactorTable:
    factors = {}
    for key, pair in section["factors"].items():
        factors[VehicleClass(key)] = (
            _finite(pair[0], f"pcu factor for {key}"),
            _finite(pair[1], f"pcu factor for {key}"),
        )
    return PcuFactorTable(
        factors, _finite(section.get("composition_threshold", 0.05),
                         "composition_threshold"))


def _build_capacity(entries: list[Mapping[str, Any]]) -> CapacityTable:
    capacities = {}
    for entry in entries:
        key = (int(entry["lanes"]), Directionality(entry["directionality"]))
        if key in capacities:
            raise ConfigError(f"duplicate capacity entry for {key}")
        capacities[key] = _finite(entry["pcu_per_hour"], f"capacity for {key}")
    return CapacityTable(capacities)


def _build_los(section: Mapping[str, Any]) -> dict[str, LosBandTable]:
    tables = {}
    for name, spec in section.items():
        bands = tuple(
            (None if bound is None else _finite(bound, f"{name} band bound"), str(grade))
            for bound, grade in spec["bands"]
        )
        tables[name] = LosBandTable(name, bands, bool(spec.get("upper_inclusive", True)))
    return tables


def _build_idle_rates(section: Mapping[str, Any]) -> IdleRateTable:
    rates = {}
    for entry in section.get("entries", []):
        key = (VehicleClass(entry["vehicle_class"]), FuelType(entry["fuel"]))
        if key in rates:
            raise ConfigError(
                f"duplicate idle-rate entry for {key[0].value}/{key[1].value}")
        rates[key] = IdleRate(
            _finite(entry["fleet_fraction"], "fleet_fraction"),
            _finite(entry["rate_per_hour"], "rate_per_hour"))
    return IdleRateTable(rates)


def _build(config: Mapping[str, Any]) -> AnalysisConfig:
    counts_unit = config["counts_unit"]
    if counts_unit not in (COUNTS_PCU, COUNTS_VEHICLES):
        raise ConfigError(
            f"counts_unit must be {COUNTS_PCU!r} or {COUNTS_VEHICLES!r}, got {counts_unit!r}")
    city = config["city"]
    rate = city.get("co2_kg_per_hour")
    return AnalysisConfig(
        version=int(config["version"]),
        counts_unit=counts_unit,
        pcu_factors=_build_pcu(config["pcu_factors"]),
        capacity_table=_build_capacity(config["capacity_table"]),
        los_tables=_build_los(config["los_bands"]),
        emission_factors=EmissionFactorTable(
            {FuelType(k): _finite(v, f"emission factor {k}")
             for k, v in config["emission_factors"].items()}),
        idle_rates=_build_idle_rates(config["idle_rates"]),
        platoon_ratios={
            str(k): _finite(v, f"platoon ratio for {k}")
            for k, v in config.get("platoon_ratios", {}).get("values", {}).items()
        },
        default_platoon_ratio=_finite(
            config.get("default_platoon_ratio", 1.0), "default_platoon_ratio"),
        city=CityScaling(
            intersection_count=int(city["intersection_count"]),
            active_hours_per_day=_finite(
                city["active_hours_per_day"], "active_hours_per_day"),
            co2_kg_per_hour=None if rate is None else _finite(rate, "co2_kg_per_hour"),
        ),
    )


def _default_dict() -> dict[str, Any]:
    text = resources.files("intersection_analyzer").joinpath(
        "data/default_config.json").read_text(encoding="utf-8")
    return _strip_notes(json.loads(text))


def load_config(path: str | Path | None = None) -> AnalysisConfig:
    """Load the effective configuration.

    ``path`` overrides sections of the shipped defaults; with no path, a
    ``config.json`` inside $ANALYZER_CONFIG_DIR is used when present.
    """
    merged = _default_dict()
    if path is None:
        config_dir = os.environ.get(ENV_CONFIG_DIR)
        if config_dir:
            candidate = Path(config_dir) / _FALLBACK_NAME
            if candidate.is_file():
                path = candidate
    if path is not None:
        try:
            with open(path, encoding="utf-8") as handle:
                overrides = json.load(handle)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as err:
            raise ConfigError(f"config file {path} is not valid JSON: {err}") from None
        if not isinstance(overrides, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        merged.update(_strip_notes(overrides))
    try:
        return _build(merged)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, AnalyzerError) as err:
        raise ConfigError(f"invalid configuration: {err}") from None
