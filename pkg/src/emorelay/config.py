"""Service configuration: JSON file, EMORELAY_* environment overrides, CLI flags.

Precedence, lowest to highest: built-in defaults, config file, environment,
explicit flag overrides.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

from .errors import BadConfig

ENV_PREFIX = "EMORELAY_"


@dataclass
class ServiceConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8765
    w_speech: float = 1.0
    w_text: float = 2.0
    model_path: Path | None = None
    lexicon_path: Path | None = None
    taxonomy_path: Path | None = None
    catalog_path: Path | None = None
    transcripts_path: Path | None = None
    storage_dir: Path = Path("emorelay-data")
    upload_ttl_s: float = 300.0
    duration_cap_s: float = 120.0
    transcribe_timeout_s: float = 10.0


_PATH_FIELDS = {
    "model_path",
    "lexicon_path",
    "taxonomy_path",
    "catalog_path",
    "transcripts_path",
    "storage_dir",
}
_FLOAT_FIELDS = {"w_speech", "w_text", "upload_ttl_s", "duration_cap_s", "transcribe_timeout_s"}
_INT_FIELDS = {"listen_port"}


def _coerce(name: str, value: Any) -> Any:
    try:
        if name in _PATH_FIELDS:
            if value is None:
                return None
            return Path(value)
        if name in _INT_FIELDS:
            if isinstance(value, bool):
                raise ValueError("not an integer")
            return int(value)
        if name in _FLOAT_FIELDS:
            if isinstance(value, bool):
                raise ValueError("not a number")
            return float(value)
        if not isinstance(value, str):
            raise ValueError("must be a string")
        return value
    except (TypeError, ValueError) as exc:
        raise BadConfig(f"{name}: {exc}") from None


def _validate(config: ServiceConfig) -> ServiceConfig:
    if not 0 < config.listen_port < 65536:
        raise BadConfig(f"listen_port: {config.listen_port} outside 1..65535")
    if config.w_speech < 0 or config.w_text < 0:
        raise BadConfig("w_speech/w_text: fusion weights must be non-negative")
    if config.w_speech + config.w_text <= 0:
        raise BadConfig("w_speech/w_text: fusion weights must not both be zero")
    for name in ("upload_ttl_s", "duration_cap_s", "transcribe_timeout_s"):
        if getattr(config, name) <= 0:
            raise BadConfig(f"{name}: must be positive")
    for name in ("model_path", "lexicon_path", "taxonomy_path", "catalog_path", "transcripts_path"):
        path = getattr(config, name)
        if path is not None and not Path(path).exists():
            raise BadConfig(f"{name}: {path} does not exist")
    return config


def load_config(
    config_path: Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> ServiceConfig:
    """Layer file, environment, and explicit overrides onto the defaults."""
    known = {f.name for f in fields(ServiceConfig)}
    values: dict[str, Any] = {}

    if config_path is not None:
        try:
            document = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise BadConfig(f"config file not found: {config_path}") from None
        except json.JSONDecodeError as exc:
            raise BadConfig(f"config file is not valid JSON: {exc}") from None
        if not isinstance(document, dict):
            raise BadConfig("config file must hold a JSON object")
        for key, value in document.items():
            if key not in known:
                raise BadConfig(f"{key}: unknown config field")
            values[key] = _coerce(key, value)

    env = os.environ if env is None else env
    for key in known:
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is not None:
            values[key] = _coerce(key, raw)

    for key, value in (overrides or {}).items():
        if key not in known:
            raise BadConfig(f"{key}: unknown config field")
        if value is not None:
            values[key] = _coerce(key, value)

    return _validate(ServiceConfig(**values))
