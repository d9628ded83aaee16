from __future__ import annotations

import copy
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import yaml


_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "paths": {
        "output_dir": "outputs",
        "logs_dir": "outputs/logs",
    },
    "limits": {
        "enumeration_cap": 12,
        "placement_cap": 10_000_000,
        "attempt_cap": 1_000_000,
        "compare_max_n": 2000,
    },
    "numerics": {
        "working_precision": 96,
    },
    "sampling": {
        "shards": 1,
        "batch_size": 4096,
        "max_workers": 4,
    },
    "verify": {
        "max_n": 7,
        "samples": 20000,
        "seed": 20240611,
    },
}


@dataclass
class Config:
    paths: Dict[str, Any]
    limits: Dict[str, Any]
    numerics: Dict[str, Any]
    sampling: Dict[str, Any]
    verify: Dict[str, Any]

    @property
    def enumeration_cap(self) -> int:
        return int(self.limits.get("enumeration_cap", 12))

    @property
    def placement_cap(self) -> int:
        return int(self.limits.get("placement_cap", 10_000_000))

    @property
    def working_precision(self) -> int:
        return int(self.numerics.get("working_precision", 96))


def _apply_env_overrides(cfg: Dict[str, Any]) -> None:
    cap = os.getenv("ROOKSTAT_CAP")
    if cap:
        cfg.setdefault("limits", {})["enumeration_cap"] = int(cap)

    shards = os.getenv("ROOKSTAT_SHARDS")
    if shards:
        cfg.setdefault("sampling", {})["shards"] = int(shards)

    precision = os.getenv("ROOKSTAT_PRECISION")
    if precision:
        cfg.setdefault("numerics", {})["working_precision"] = int(precision)


def _resolve_paths(cfg: Dict[str, Any], base_dir: Path) -> None:
    paths = cfg.setdefault("paths", {})
    for key in ["output_dir", "logs_dir"]:
        if key in paths:
            paths[key] = str((base_dir / paths[key]).resolve())


def _merge_defaults(data: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(_DEFAULTS)
    for section, values in data.items():
        if isinstance(values, dict):
            merged.setdefault(section, {}).update(values)
        else:
            merged[section] = values
    return merged


def _build(data: Dict[str, Any]) -> Config:
    return Config(
        paths=data.get("paths", {}),
        limits=data.get("limits", {}),
        numerics=data.get("numerics", {}),
        sampling=data.get("sampling", {}),
        verify=data.get("verify", {}),
    )


def default_config() -> Config:
    data = copy.deepcopy(_DEFAULTS)
    _apply_env_overrides(data)
    return _build(data)


def load_config(path: str, *, base_dir: Optional[str] = None) -> Config:
    config_path = Path(path)
    if not config_path.exists():
        return default_config()

    base = Path(base_dir or config_path.parent).resolve()
    data = yaml.safe_load(config_path.read_text())
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValueError("Config file must be a YAML mapping")

    data = _merge_defaults(data)
    _apply_env_overrides(data)
    _resolve_paths(data, base)

    return _build(data)
