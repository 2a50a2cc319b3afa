import json

import pytest

from kmpath.config import bundled_config_path, load_config, parse_config
from kmpath.errors import ConfigError
from kmpath.model import double_well


def test_bundled_configs_load():
    for name in ("example1", "example2.json"):
        cfg = load_config(name)
        assert cfg.simulation.seed == 1 and cfg.regression.fold_seed == 0
        assert cfg.grid.n_x == 401
    assert load_config("example1").model == double_well()
    assert load_config("example2").model == double_well("multiplicative")
    assert bundled_config_path("nope") is None


def test_defaults_and_resolution(small_config):
    p, d = small_config()
    cfg = load_config(p)
    r = cfg.resolved()
    assert r["regression"]["one_se"] is False and r["regression"]["weighted"] is False
    assert r["binning"]["range"] == "auto"
    assert r["problem"] == {"x0": -2.0, "xf": 2.0, "tf": 1.0}
    json.dumps(r)


@pytest.mark.parametrize("patch", [
    {"extra": 1},
    {"simulation": {"sed": 1}},
    {"binning": {"bins": 3}},
    {"regression": {"k": 1}},
    {"regression": {"max_degree_scan": [13]}},
    {"pde": {"n_x": 2}},
    {"problem": {"x0": -9.0}},
    {"problem": {"tf": -1.0}},
    {"model": {"drift": [0.0], "diff2": [1.0], "kind": "x"}},
    {"model": "from-data"},
    {"compare_true_path": "yes"},
    {"simulation": {"seed": -3}},
])
def test_invalid_configs(small_config, patch):
    _, d = small_config(**patch)
    with pytest.raises(ConfigError):
        parse_config(d)


def test_missing_problem_and_file(tmp_path):
    with pytest.raises(ConfigError):
        parse_config({"model": {"drift": [0.0], "diff2": [1.0]}})
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.json")


def test_strict_repro(small_config):
    _, d = small_config()
    del d["simulation"]["seed"]
    with pytest.raises(ConfigError):
        parse_config(d, strict_repro=True)
    assert parse_config(d, seed_override=5, strict_repro=True).simulation.seed == 5
    _, d = small_config()
    del d["regression"]["fold_seed"]
    with pytest.raises(ConfigError):
        parse_config(d, strict_repro=True)
    assert parse_config(d).regression.fold_seed == 0


def test_from_data(small_config, tmp_path):
    _, d = small_config(model="from-data", pairs_file=str(tmp_path / "pairs.csv"))
    del d["simulation"]
    cfg = parse_config(d)
    assert cfg.model is None and cfg.simulation is None and not cfg.compare_true_path
