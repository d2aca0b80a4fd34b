"""Pipeline configuration: dataclass sections, JSON file loading, overrides.

The on-disk form is a JSON object whose sections mirror the dataclasses
below, e.g. {"quad": {"entropy_thresh": 3.0}}. Unknown sections or keys
are rejected rather than ignored so typos fail loudly. Override strings
use dotted paths: "quad.entropy_thresh=3.0".
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field


class ConfigError(Exception):
    """Raised for unreadable, malformed, or out-of-range configuration."""


@dataclass(frozen=True)
class LayersConfig:
    edges: tuple = (50, 100, 150, 200)
    keep: tuple = (2, 3, 4)


@dataclass(frozen=True)
class BlocksegConfig:
    block_size: int = 10
    zero_thresh: float = 50
    zero_thresh_mode: str = "absolute"


@dataclass(frozen=True)
class QuadConfig:
    entropy_thresh: float = 2.5
    min_size: int = 1
    max_depth: int = 10


@dataclass(frozen=True)
class RoiConfig:
    fine_side: int = 8
    min_area: int = 64


@dataclass(frozen=True)
class EvalConfig:
    iou_thresh: float = 0.25


@dataclass(frozen=True)
class IoConfig:
    dump_stages: bool = False


_SECTION_TYPES = {
    "layers": LayersConfig,
    "blockseg": BlocksegConfig,
    "quad": QuadConfig,
    "roi": RoiConfig,
    "eval": EvalConfig,
    "io": IoConfig,
}


@dataclass(frozen=True)
class PipelineConfig:
    layers: LayersConfig = field(default_factory=LayersConfig)
    blockseg: BlocksegConfig = field(default_factory=BlocksegConfig)
    quad: QuadConfig = field(default_factory=QuadConfig)
    roi: RoiConfig = field(default_factory=RoiConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    io: IoConfig = field(default_factory=IoConfig)

    def to_dict(self):
        """JSON-ready nested dict; tuples become lists."""
        out = {}
        for name, cls in _SECTION_TYPES.items():
            section = getattr(self, name)
            row = {}
            for f in dataclasses.fields(cls):
                value = getattr(section, f.name)
                row[f.name] = list(value) if isinstance(value, tuple) else value
            out[name] = row
        return out


def _coerce(section, key, raw, annotation):
    try:
        if annotation is tuple:
            if not isinstance(raw, (list, tuple)):
                raise TypeError("expected a list")
            return tuple(raw)
        if annotation is int:
            if isinstance(raw, bool) or int(raw) != raw:
                raise TypeError("expected an integer")
            return int(raw)
        if annotation is float:
            if isinstance(raw, bool):
                raise TypeError("expected a number")
            return float(raw)
        if annotation is str:
            if not isinstance(raw, str):
                raise TypeError("expected a string")
            return raw
        if annotation is bool:
            if not isinstance(raw, bool):
                raise TypeError("expected a boolean")
            return raw
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}.{key}: bad value {raw!r} ({exc})") from exc
    raise ConfigError(f"{section}.{key}: unhandled config type {annotation!r}")


def config_from_dict(data) -> PipelineConfig:
    """Build a validated PipelineConfig from a nested dict."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    sections = {}
    for section_name, payload in data.items():
        cls = _SECTION_TYPES.get(section_name)
        if cls is None:
            raise ConfigError(f"unknown config section {section_name!r}")
        if not isinstance(payload, dict):
            raise ConfigError(f"section {section_name!r} must be an object")
        fields = {f.name: f.type for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, raw in payload.items():
            if key not in fields:
                raise ConfigError(f"unknown config key {section_name}.{key}")
            annotation = cls.__dataclass_fields__[key].type
            if isinstance(annotation, str):
                annotation = {"tuple": tuple, "int": int, "float": float,
                              "str": str, "bool": bool}[annotation]
            kwargs[key] = _coerce(section_name, key, raw, annotation)
        sections[section_name] = cls(**kwargs)
    cfg = PipelineConfig(**sections)
    validate_config(cfg)
    return cfg


def load_config(path) -> PipelineConfig:
    """Load a JSON config file; malformed content raises ConfigError."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def apply_overrides(cfg: PipelineConfig, assignments) -> PipelineConfig:
    """Apply "section.key=value" override strings on top of a config.

    Values are parsed as JSON when possible (numbers, booleans, lists)
    and fall back to plain strings.
    """
    data = cfg.to_dict()
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of form key=value")
        path, _, raw = item.partition("=")
        parts = path.strip().split(".")
        if len(parts) != 2:
            raise ConfigError(f"override path {path!r} must be section.key")
        section, key = parts
        if section not in data:
            raise ConfigError(f"unknown config section {section!r}")
        if key not in data[section]:
            raise ConfigError(f"unknown config key {section}.{key}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        data[section][key] = value
    return config_from_dict(data)


def validate_config(cfg: PipelineConfig) -> None:
    """Range and consistency checks; raises ConfigError on violation."""
    edges = cfg.layers.edges
    if not edges:
        raise ConfigError("layers.edges must not be empty")
    bounds = (0,) + tuple(edges) + (256,)
    for a, b in zip(bounds, bounds[1:]):
        if not (isinstance(a, int) or float(a).is_integer()) or not a < b:
            raise ConfigError(
                f"layers.edges must be strictly increasing in (0, 256): {edges}")
    n_bands = len(edges) + 1
    if not cfg.layers.keep:
        raise ConfigError("layers.keep must not be empty")
    for k in cfg.layers.keep:
        if not (isinstance(k, int) and 1 <= k <= n_bands):
            raise ConfigError(
                f"layers.keep index {k!r} outside 1..{n_bands}")
    if cfg.blockseg.block_size < 1:
        raise ConfigError("blockseg.block_size must be >= 1")
    if cfg.blockseg.zero_thresh < 0:
        raise ConfigError("blockseg.zero_thresh must be >= 0")
    if cfg.blockseg.zero_thresh_mode not in ("absolute", "fraction"):
        raise ConfigError(
            "blockseg.zero_thresh_mode must be 'absolute' or 'fraction'")
    if cfg.quad.min_size < 1:
        raise ConfigError("quad.min_size must be >= 1")
    if cfg.quad.max_depth < 0:
        raise ConfigError("quad.max_depth must be >= 0")
    if cfg.roi.fine_side < 1:
        raise ConfigError("roi.fine_side must be >= 1")
    if cfg.roi.min_area < 0:
        raise ConfigError("roi.min_area must be >= 0")
    if not 0.0 <= cfg.eval.iou_thresh <= 1.0:
        raise ConfigError("eval.iou_thresh must be in [0, 1]")
