from __future__ import annotations

from pathlib import Path

import pytest

from tepid_adapt.config import DEFAULT_BETA_MIN_GRID, PHASE_SUBSPACES, load_config, parse_config
from tepid_adapt.errors import ConfigError

BASE = """schema = 1
n_sites = 6
j_z = 1.5
beta_bar = 3.0
subspace = ["010101", "010110", "010100"]
"""

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def test_minimal_run_config():
    cfg = parse_config(BASE, "run")
    assert cfg.model.n_sites == 6 and cfg.model.j_z == 1.5
    assert cfg.beta_bar == 3.0
    assert cfg.subspace.m == 3
    assert cfg.m_list == (3,)
    assert cfg.epsilon == 1e-6


def test_missing_beta_bar_names_the_field():
    text = BASE.replace("beta_bar = 3.0\n", "")
    with pytest.raises(ConfigError, match="missing required field 'beta_bar'") as info:
        parse_config(text, "run")
    assert info.value.field == "beta_bar"


def test_command_specific_fields():
    with pytest.raises(ConfigError, match="m_values"):
        parse_config(BASE, "m-scan")
    with pytest.raises(ConfigError, match="epsilon_values"):
        parse_config(BASE, "tolerance-scan")
    cfg = parse_config("schema = 1\nfidelity_thresholds = [0.99]\n", "scaling-study")
    assert cfg.model is None and cfg.beta_min_grid == DEFAULT_BETA_MIN_GRID


def test_bad_type_reports_line():
    text = BASE.replace("j_z = 1.5", 'j_z = "strong"')
    with pytest.raises(ConfigError) as info:
        parse_config(text, "run")
    assert info.value.line == 3 and info.value.field == "j_z"
    assert str(info.value).startswith("line 3:")


def test_malformed_toml_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config(BASE + "m_values = [2, 3\n", "run")
    assert info.value.line is not None and info.value.line >= 6


def test_unknown_field_rejected():
    with pytest.raises(ConfigError, match="unknown field 'temperature'") as info:
        parse_config(BASE + "temperature = 0.3\n", "run")
    assert info.value.line == 6


def test_phase_name_resolves_subspace():
    text = BASE.replace('["010101", "010110", "010100"]', '"antiferromagnetic"')
    cfg = parse_config(text, "run")
    assert cfg.subspace.elements == PHASE_SUBSPACES["antiferromagnetic"]
    with pytest.raises(ConfigError, match="phase"):
        parse_config(BASE.replace('["010101", "010110", "010100"]', '"glassy"'), "run")


@pytest.mark.parametrize("extra,field", [
    ("m_values = [4]\n", "m_values"),
    ("m_values = [0]\n", "m_values"),
    ("fidelity_thresholds = [1.5]\n", "fidelity_thresholds"),
    ("epsilon_values = [-1e-3]\n", "epsilon_values"),
    ("beta_grid = [0.0, 1.0]\n", "beta_grid"),
    ("restarts = 0\n", "restarts"),
])
def test_value_ranges(extra, field):
    with pytest.raises(ConfigError) as info:
        parse_config(BASE + extra, "run")
    assert info.value.field == field


def test_subspace_width_must_match_chain():
    with pytest.raises(ConfigError, match="bits"):
        parse_config(BASE.replace("n_sites = 6", "n_sites = 5"), "run")
    with pytest.raises(ConfigError):
        parse_config(BASE.replace('"010100"', '"010101"'), "run")  # duplicate label


def test_schema_version():
    with pytest.raises(ConfigError, match="schema"):
        parse_config(BASE.replace("schema = 1", "schema = 2"), "run")


def test_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        load_config("/nonexistent/config.toml", "run")


@pytest.mark.parametrize("name,command", [
    ("antiferro_run.toml", "run"),
    ("antiferro_m_scan.toml", "m-scan"),
    ("ferro_m_scan.toml", "m-scan"),
    ("para_m_scan.toml", "m-scan"),
    ("antiferro_beta.toml", "beta-extrapolate"),
    ("antiferro_tolerance.toml", "tolerance-scan"),
    ("scaling.toml", "scaling-study"),
    ("para_random_restart.toml", "random-restart"),
])
def test_shipped_configs_parse(name, command):
    cfg = load_config(CONFIG_DIR / name, command)
    assert cfg.seed == 7
