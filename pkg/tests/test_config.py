import json

import pytest

from lurye_ozf.analysis.multiplier_search import ClassMode
from lurye_ozf.core.exceptions import ConfigError
from lurye_ozf.util.config_parser import ConfigParser
from lurye_ozf.util.serialization import dumps, load_json


def parse(raw, overrides=None):
    return ConfigParser(json.dumps(raw)).parse(overrides)


def test_defaults():
    config = ConfigParser().parse()
    assert config.plant is None
    assert config.search.B == 2
    assert config.search.mode == ClassMode.HYPERDOMINANT.value
    assert config.certificate.horizon == config.certificate.T
    assert config.simulation.nonlinearity.lipschitz == pytest.approx(0.5)


def test_full_config(tmp_path):
    raw = {
        "plant": {"num": [0.0, -1.0], "den": [1.0, -0.5]},
        "multiplier": {"B": 1, "coeffs": [-0.5, 1.0, -0.5], "mode": "zero_excess"},
        "search": {"B": 3, "mode": "zero_excess"},
        "certificate": {"T": 4, "B": 1, "H": 8},
        "simulation": {"H": 32, "input": {"start": 0, "values": [1.0]}},
        "hunt": {"budget": 4, "psi": {"phases": [{"left_slope": 1.0, "right_slope": 1.0}]}},
        "seed": 9,
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(raw))
    config = ConfigParser(str(path)).parse()
    assert config.require_plant().den == (1.0, -0.5)
    assert config.multiplier.mode == ClassMode.ZERO_EXCESS
    assert config.certificate.horizon == 8
    assert config.simulation.input[0] == 1.0
    assert config.hunt.psi.period == 1
    assert config.seed == 9
    # resolved config is serializable and parses back
    again = parse(json.loads(dumps(config.to_json())))
    assert again == config


def test_overrides_win_over_file():
    config = parse({"seed": 1, "out": "a"}, {"seed": 5, "out": "b", "jobs": None})
    assert config.seed == 5
    assert config.out == "b"


@pytest.mark.parametrize("raw", [
    {"bogus": 1},
    {"search": {"nope": 1}},
    {"search": {"B": "abc"}},
    {"search": {"mode": "other"}},
    {"plant": {"num": [1.0], "den": [0.0]}},
    {"plant": {"den": [1.0]}},
    {"certificate": {"T": 3, "B": 1, "H": 4}},
    {"certificate": {"T": 2, "B": 1}},
    {"multiplier": {"B": 1, "coeffs": [0.5, 1.0, 0.0]}},
    {"simulation": {"nonlinearity": {"breakpoints": [[0, 0], [1, -1]]}}},
    [1, 2],
])
def test_rejects_bad_config(raw):
    with pytest.raises(ConfigError):
        parse(raw)


def test_require_plant():
    with pytest.raises(ConfigError):
        ConfigParser().parse().require_plant()


def test_load_json(tmp_path):
    assert load_json('{"a": 1}') == {"a": 1}
    assert load_json(" [1, 2]") == [1, 2]
    path = tmp_path / "x.json"
    path.write_text('{"b": 2}')
    assert load_json(str(path)) == {"b": 2}
    with pytest.raises(ConfigError):
        load_json('{"a": ')
    with pytest.raises(ConfigError):
        load_json(str(tmp_path / "missing.json"))
