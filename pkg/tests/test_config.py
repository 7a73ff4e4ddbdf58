"""
Test run configuration loading and precedence
"""
from pathlib import Path

import pytest

from app.config import RunConfig, load_run_config, parse_overrides, read_config_file
from app.errors import ConfigError


def test_defaults():
    cfg = load_run_config()

    assert cfg.n == 2
    assert cfg.tol == 1e-9
    assert cfg.constants_source == "CODATA-2018"
    assert cfg.reduced_mass
    assert cfg.out_dir == Path("reports")


def test_precedence_flags_over_file_over_env(tmp_path, monkeypatch):
    monkeypatch.setenv("SPINORLAB_SEED", "11")
    monkeypatch.setenv("SPINORLAB_TRIALS", "40")
    monkeypatch.setenv("SPINORLAB_GRID", "96")
    config_file = tmp_path / "run.cfg"
    config_file.write_text("# overrides\nTRIALS=50\nn=3\n\nseed=12\n")

    cfg = load_run_config(config_file, seed=13, n=None)

    assert cfg.seed == 13
    assert cfg.trials == 50
    assert cfg.n == 3
    assert cfg.grid == 96


def test_unknown_key_rejected(tmp_path):
    config_file = tmp_path / "run.cfg"
    config_file.write_text("trails=5\n")

    with pytest.raises(ConfigError, match="trails"):
        load_run_config(config_file)


@pytest.mark.parametrize("flags, fragment", [
    ({"n": 9}, "out of supported range"),
    ({"n_max": 0}, "n_max"),
    ({"trials": 0}, "trials"),
    ({"tol": -1e-9}, "tol"),
    ({"constants_source": "CODATA-1998"}, "constants_source"),
])
def test_invalid_values(flags, fragment):
    with pytest.raises(ConfigError, match=fragment):
        load_run_config(**flags)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        read_config_file(tmp_path / "absent.cfg")


def test_config_is_frozen():
    cfg = RunConfig()

    with pytest.raises(Exception):
        cfg.n = 4


def test_report_fields_are_plain():
    fields = load_run_config(out_dir=Path("out")).report_fields()

    assert fields["out_dir"] == "out"
    assert fields["seed"] == 7


def test_parse_overrides():
    assert parse_overrides(["v_q5=1.0", "V_S4 = 2.5"]) == {"V_Q5": 1.0, "V_S4": 2.5}
    assert parse_overrides(None) == {}


@pytest.mark.parametrize("item", ["V_Q5", "V_Q5=abc", "V_Q5=-1", "V_X=1.0"])
def test_bad_overrides(item):
    with pytest.raises(ConfigError):
        parse_overrides([item])
