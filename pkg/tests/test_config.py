"""Config loading, strict key checking, overrides, validation."""

import json

import pytest

from mammroi import config as cfgmod
from mammroi.config import (
    ConfigError,
    PipelineConfig,
    apply_overrides,
    config_from_dict,
    load_config,
    validate_config,
)


def test_defaults():
    cfg = PipelineConfig()
    assert cfg.layers.edges == (50, 100, 150, 200)
    assert cfg.layers.keep == (2, 3, 4)
    assert cfg.blockseg.block_size == 10
    assert cfg.blockseg.zero_thresh == 50
    assert cfg.blockseg.zero_thresh_mode == "absolute"
    assert cfg.quad.entropy_thresh == 2.5
    assert cfg.quad.min_size == 1
    assert cfg.quad.max_depth == 10
    assert cfg.roi.fine_side == 8
    assert cfg.roi.min_area == 64
    assert cfg.eval.iou_thresh == 0.25
    assert cfg.io.dump_stages is False


def test_round_trip_via_dict():
    cfg = PipelineConfig()
    again = config_from_dict(cfg.to_dict())
    assert again == cfg


def test_to_dict_is_json_serializable():
    json.dumps(PipelineConfig().to_dict())


def test_partial_dict_keeps_other_defaults():
    cfg = config_from_dict({"blockseg": {"block_size": 4}})
    assert cfg.blockseg.block_size == 4
    assert cfg.blockseg.zero_thresh == 50
    assert cfg.quad.entropy_thresh == 2.5


def test_unknown_section_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"blockzeg": {"block_size": 4}})


def test_unknown_key_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"quad": {"entropy_threshold": 3.0}})


def test_load_config_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"quad": {"entropy_thresh": 3.25}}))
    cfg = load_config(str(path))
    assert cfg.quad.entropy_thresh == 3.25


def test_load_config_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/config.json")


def test_load_config_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_apply_overrides():
    cfg = apply_overrides(PipelineConfig(), [
        "blockseg.zero_thresh=60",
        "quad.entropy_thresh=3.0",
        "io.dump_stages=true",
        "blockseg.zero_thresh_mode=fraction",
    ])
    assert cfg.blockseg.zero_thresh == 60
    assert cfg.quad.entropy_thresh == 3.0
    assert cfg.io.dump_stages is True
    assert cfg.blockseg.zero_thresh_mode == "fraction"


def test_override_tuple_value():
    cfg = apply_overrides(PipelineConfig(), ["layers.keep=[1, 2, 3]"])
    assert cfg.layers.keep == (1, 2, 3)


def test_override_bad_shape():
    with pytest.raises(ConfigError):
        apply_overrides(PipelineConfig(), ["quad.entropy_thresh"])
    with pytest.raises(ConfigError):
        apply_overrides(PipelineConfig(), ["entropy_thresh=3.0"])
    with pytest.raises(ConfigError):
        apply_overrides(PipelineConfig(), ["quad.nope=3.0"])


@pytest.mark.parametrize("section,key,value", [
    ("layers", "edges", (50, 40, 150, 200)),
    ("layers", "edges", (0, 100, 150, 200)),
    ("layers", "keep", (0,)),
    ("layers", "keep", (6,)),
    ("blockseg", "block_size", 0),
    ("blockseg", "zero_thresh", -1),
    ("blockseg", "zero_thresh_mode", "maybe"),
    ("quad", "min_size", 0),
    ("quad", "max_depth", -1),
    ("roi", "fine_side", 0),
    ("roi", "min_area", -1),
    ("eval", "iou_thresh", 1.5),
    ("eval", "iou_thresh", -0.1),
])
def test_validate_rejects_bad_values(section, key, value):
    with pytest.raises(ConfigError):
        config_from_dict({section: {key: list(value) if isinstance(value, tuple)
                                    else value}})


def test_validate_config_passes_defaults():
    validate_config(PipelineConfig())
