import sys
from os import path

sys.path.append(path.dirname(path.dirname(path.abspath(__file__))))
from src.config import SCENARIOS
from src.exceptions import ScenarioConfigException
from src.presets import PRESETS, list_presets, preset_config


def test_every_preset_validates():
    for name in PRESETS:
        config = preset_config(name)
        assert config.scenario in SCENARIOS
        config.validate()


def test_preset_config_is_a_copy():
    config = preset_config("health-fig5")
    config.override("alpha", 0.5)
    config.sweep.series_values.append(0.1)
    fresh = preset_config("health-fig5")
    assert "alpha" not in fresh.parameters
    assert fresh.sweep.series_values == [1.0, 0.8]


def test_list_presets_sorted():
    listing = list_presets()
    names = [name for name, _, _ in listing]
    assert names == sorted(PRESETS)
    assert ("voting-fig7", "voting", PRESETS["voting-fig7"]["description"]) in listing


def test_unknown_preset():
    try:
        preset_config("health-fig9")
    except ScenarioConfigException as e:
        assert "health-fig9" in str(e)
        return

    assert False, "Expected ScenarioConfigException, but it was not raised"
