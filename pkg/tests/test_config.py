import json

import pytest

from intersection_analyzer import Directionality, FuelType, load_config
from intersection_analyzer.config import ENV_CONFIG_DIR
from intersection_analyzer.errors import ConfigError


def test_defaults_load(default_config):
    cfg = default_config
    assert cfg.version == 1
    assert cfg.counts_unit == "pcu"
    assert cfg.capacity_table.capacities[(3, Directionality.ONE_WAY)] == 3600.0
    assert set(cfg.los_tables) == {"delay_heterogeneous", "delay_hcm", "vc_ratio"}
    assert cfg.emission_factors.factors[FuelType.DIESEL] == 2.640
    assert len(cfg.idle_rates.rates) == 6
    assert cfg.platoon_ratio_for("SR1") != 1.0
    assert cfg.platoon_ratio_for("unknown") == 1.0
    assert cfg.city.intersection_count == 6
    assert cfg.city.active_hours_per_day == 13.0


def test_section_override(tmp_path):
    override = {
        "counts_unit": "vehicles",
        "city": {"intersection_count": 9, "active_hours_per_day": 10,
                 "co2_kg_per_hour": None},
    }
    path = tmp_path / "override.json"
    path.write_text(json.dumps(override))
    cfg = load_config(path)
    assert cfg.counts_unit == "vehicles"
    assert cfg.city.intersection_count == 9
    assert cfg.city.co2_kg_per_hour is None
    # untouched sections keep their defaults
    assert cfg.capacity_table.capacities[(1, Directionality.ONE_WAY)] == 1500.0


def test_env_dir_fallback(tmp_path, monkeypatch):
    (tmp_path / "config.json").write_text(json.dumps({"counts_unit": "vehicles"}))
    monkeypatch.setenv(ENV_CONFIG_DIR, str(tmp_path))
    assert load_config().counts_unit == "vehicles"
    monkeypatch.delenv(ENV_CONFIG_DIR)
    assert load_config().counts_unit == "pcu"


def test_explicit_path_beats_env(tmp_path, monkeypatch):
    env_dir = tmp_path / "env"
    env_dir.mkdir()
    (env_dir / "config.json").write_text(json.dumps({"counts_unit": "vehicles"}))
    monkeypatch.setenv(ENV_CONFIG_DIR, str(env_dir))
    explicit = tmp_path / "explicit.json"
    explicit.write_text(json.dumps({"counts_unit": "pcu"}))
    assert load_config(explicit).counts_unit == "pcu"


def test_missing_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")


def test_malformed_json_errors(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)


def test_bad_counts_unit_errors(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"counts_unit": "furlongs"}))
    with pytest.raises(ConfigError):
        load_config(path)


def test_bad_band_table_errors(tmp_path):
    path = tmp_path / "bands.json"
    path.write_text(json.dumps({
        "los_bands": {
            "delay_heterogeneous": {
                "upper_inclusive": True,
                "bands": [[10, "A"], [5, "B"], [65, "C"], [100, "D"],
                          [135, "E"], [None, "F"]],
            },
        },
    }))
    with pytest.raises(ConfigError):
        load_config(path)
