"""JSON scheme configs: parsing, validation and dispatch.

A config is a flat JSON object with a ``scheme`` key (``mf``, ``ae``,
``2mf`` or ``mfs-ae``) plus that scheme's fields. Windows are written as an
odd integer side. The nested ``ae`` object holds autoencoder fields.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .autoencoder import AeConfig, ae_filter
from .image import WindowSpec
from .median import RecursionConfig, median_filter, recursive_threshold_denoise
from .schemes import MfsAeConfig, TwoMfConfig, denoise_2mf, denoise_mfs_ae

SCHEMES = ("mf", "ae", "2mf", "mfs-ae")


class ConfigError(ValueError):
    """Invalid scheme config; the message names the offending fields."""


@dataclass(frozen=True)
class AeSchemeConfig:
    """The AE used as the filter of the recursive threshold loop."""

    threshold: float = 0.2
    passes: int = 1
    ae: AeConfig = field(default_factory=AeConfig)

    def __post_init__(self):
        RecursionConfig(WindowSpec(1), self.threshold, self.passes)


_REQUIRED = {
    "mf": ("window", "threshold", "passes"),
    "ae": ("threshold", "passes", "ae"),
    "2mf": ("w1", "w2", "thr1_w1", "thr1_w2", "thr2", "passes"),
    "mfs-ae": ("w1", "w2", "thr_min", "thr_max", "thr_step", "thr_w2", "passes", "ae", "thr_final"),
}
_AE_REQUIRED = ("block_h", "block_w", "window", "epochs", "learning_rate", "compression_ratio")


def required_fields(scheme: str) -> tuple:
    return _REQUIRED[scheme]


def _check_keys(doc: dict, required, allowed, where: str):
    missing = [k for k in required if k not in doc]
    unknown = [k for k in doc if k not in allowed]
    problems = []
    if missing:
        problems.append(f"{where}missing required fields: {', '.join(missing)}")
    if unknown:
        problems.append(f"{where}unknown fields: {', '.join(sorted(unknown))}")
    if problems:
        raise ConfigError("; ".join(problems))


def _field_names(cls) -> set:
    return {f.name for f in dataclasses.fields(cls)}


def _window(value, name):
    if isinstance(value, dict):
        value = value.get("side")
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name}: window side must be an odd integer, got {value!r}")
    try:
        return WindowSpec(value)
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def _build(cls, kwargs, where):
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}{exc}") from exc


def parse_ae(doc, where="ae: ") -> AeConfig:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}expected an object")
    _check_keys(doc, _AE_REQUIRED, _field_names(AeConfig), where)
    kwargs = dict(doc)
    kwargs["window"] = _window(doc["window"], "ae.window")
    return _build(AeConfig, kwargs, where)


def parse_config(doc: dict):
    """Validate a config document and return ``(scheme, config_object)``."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    scheme = doc.get("scheme")
    if scheme not in SCHEMES:
        raise ConfigError(f"scheme: expected one of {', '.join(SCHEMES)}, got {scheme!r}")
    body = {k: v for k, v in doc.items() if k not in ("scheme", "description")}
    req = _REQUIRED[scheme]
    if scheme == "mf":
        _check_keys(body, req, req, "")
        cfg = _build(RecursionConfig, dict(body, window=_window(body["window"], "window")), "")
    elif scheme == "ae":
        _check_keys(body, req, req, "")
        cfg = _build(AeSchemeConfig, dict(body, ae=parse_ae(body["ae"])), "")
    elif scheme == "2mf":
        _check_keys(body, req, req, "")
        cfg = _build(TwoMfConfig, dict(body, w1=_window(body["w1"], "w1"),
                                       w2=_window(body["w2"], "w2")), "")
    else:
        _check_keys(body, req, req, "")
        cfg = _build(MfsAeConfig, dict(body, w1=_window(body["w1"], "w1"),
                                       w2=_window(body["w2"], "w2"),
                                       ae=parse_ae(body["ae"])), "")
    return scheme, cfg


def load_config(path):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return parse_config(doc)


def preset_names() -> list[str]:
    files = resources.files(__package__) / "presets"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def load_preset(name: str):
    """Load a bundled preset such as ``table3``."""
    path = resources.files(__package__) / "presets" / f"{name}.json"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return parse_config(json.loads(path.read_text()))


def config_to_dict(scheme: str, cfg) -> dict:
    """Inverse of :func:`parse_config`; windows collapse to their side."""
    def conv(obj):
        if isinstance(obj, WindowSpec):
            return obj.side
        if dataclasses.is_dataclass(obj):
            return {f.name: conv(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        return obj

    return {"scheme": scheme, **conv(cfg)}


def run_scheme(source, scheme: str, cfg) -> np.ndarray:
    if scheme == "mf":
        return recursive_threshold_denoise(source, median_filter(cfg.window), cfg)
    if scheme == "ae":
        loop = RecursionConfig(WindowSpec(1), cfg.threshold, cfg.passes)
        return recursive_threshold_denoise(source, ae_filter(cfg.ae), loop)
    if scheme == "2mf":
        return denoise_2mf(source, cfg)
    if scheme == "mfs-ae":
        return denoise_mfs_ae(source, cfg)
    raise ConfigError(f"unknown scheme {scheme!r}")
