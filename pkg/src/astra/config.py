"""Pipeline configuration.

Layers, lowest precedence first: built-in defaults, the TOML config file
(``.astra/config.toml`` unless ``--config`` names another), environment
variables, command-line flags.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .embedding import DEFAULT_DIMENSION, EMBED_ENDPOINT_ENV, EmbedderConfig
from .errors import InvalidValue, UnreadableConfig
from .model_client import DEFAULT_API_KEY_ENV, DEFAULT_TIMEOUT, MODEL_ENDPOINT_ENV, ModelEndpointConfig
from .retrieval import DEFAULT_TOP_K

DEFAULT_CONFIG_PATH = Path(".astra") / "config.toml"

DEFAULTS: dict[str, Any] = {
    "index_path": None,
    "compile_db_path": None,
    "top_k": DEFAULT_TOP_K,
    "min_score": None,
    "char_budget": None,
    "general_instructions_path": None,
    "run_root": str(Path(".astra") / "runs"),
    "embedder.kind": "deterministic",
    "embedder.dimension": DEFAULT_DIMENSION,
    "embedder.endpoint": None,
    "embedder.model_name": None,
    "model.kind": "local_runtime",
    "model.base_url": "http://localhost:11434",
    "model.model_name": "codellama:13b-instruct",
    "model.api_key_env": DEFAULT_API_KEY_ENV,
    "model.replay_dir": str(Path(".astra") / "replay"),
    "model.timeout": DEFAULT_TIMEOUT,
}

ENV_KEYS = {
    MODEL_ENDPOINT_ENV: "model.base_url",
    EMBED_ENDPOINT_ENV: "embedder.endpoint",
}

_INT_KEYS = {"top_k", "char_budget", "embedder.dimension"}
_FLOAT_KEYS = {"min_score", "model.timeout"}


@dataclass(frozen=True)
class PipelineConfig:
    index_path: Optional[str]
    compile_db_path: Optional[str]
    embedder: EmbedderConfig
    model: ModelEndpointConfig
    top_k: int = DEFAULT_TOP_K
    min_score: Optional[float] = None
    char_budget: Optional[int] = None
    general_instructions_path: Optional[str] = None
    run_root: str = DEFAULTS["run_root"]

    def to_json(self) -> dict:
        return {
            "index_path": self.index_path,
            "compile_db_path": self.compile_db_path,
            "top_k": self.top_k,
            "min_score": self.min_score,
            "char_budget": self.char_budget,
            "general_instructions_path": self.general_instructions_path,
            "run_root": self.run_root,
            "embedder": {"kind": self.embedder.kind, "dimension": self.embedder.dimension,
                         "endpoint": self.embedder.endpoint,
                         "model_name": self.embedder.model_name},
            "model": {"kind": self.model.kind, "base_url": self.model.base_url,
                      "model_name": self.model.model_name,
                      "api_key_env": self.model.api_key_env,
                      "replay_dir": self.model.replay_dir, "timeout": self.model.timeout},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _flatten(obj: Mapping, prefix: str = "") -> dict[str, Any]:
    flat = {}
    for key, value in obj.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(_flatten(value, name + "."))
        else:
            flat[name] = value
    return flat


def read_config_file(path) -> dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise UnreadableConfig(f"cannot read config {path}: {exc}") from exc
    flat = _flatten(data)
    unknown = sorted(set(flat) - set(DEFAULTS))
    if unknown:
        raise InvalidValue(unknown[0], "unknown configuration key")
    return flat


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        return None
    try:
        if key in _INT_KEYS:
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise ValueError(value)
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
    except (TypeError, ValueError):
        raise InvalidValue(key, f"expected a number, got {value!r}") from None
    return str(value) if not isinstance(value, str) else value


def load_config(path=None, env: Optional[Mapping[str, str]] = None,
                overrides: Optional[Mapping[str, Any]] = None) -> PipelineConfig:
    """Merge defaults, config file, environment and flag overrides."""
    env = os.environ if env is None else env
    merged = dict(DEFAULTS)
    if path is not None:
        merged.update(read_config_file(path))
    elif DEFAULT_CONFIG_PATH.is_file():
        merged.update(read_config_file(DEFAULT_CONFIG_PATH))
    for var, key in ENV_KEYS.items():
        if env.get(var):
            merged[key] = env[var]
    for key, value in (overrides or {}).items():
        if key not in DEFAULTS:
            raise InvalidValue(key, "unknown configuration key")
        if value is not None:
            merged[key] = value
    merged = {k: _coerce(k, v) for k, v in merged.items()}

    if merged["top_k"] is None or merged["top_k"] < 1:
        raise InvalidValue("top_k", "must be >= 1")
    if merged["char_budget"] is not None and merged["char_budget"] < 1:
        raise InvalidValue("char_budget", "must be positive")
    if merged["min_score"] is not None and not -1.0 <= merged["min_score"] <= 1.0:
        raise InvalidValue("min_score", "must lie in [-1, 1]")
    if merged["model.timeout"] is not None and merged["model.timeout"] <= 0:
        raise InvalidValue("model.timeout", "must be positive")

    try:
        embedder = EmbedderConfig(merged["embedder.kind"], merged["embedder.dimension"],
                                  merged["embedder.endpoint"], merged["embedder.model_name"])
    except ValueError as exc:
        raise InvalidValue("embedder", str(exc)) from None
    try:
        model = ModelEndpointConfig(merged["model.kind"], merged["model.model_name"],
                                    merged["model.base_url"], merged["model.api_key_env"],
                                    merged["model.replay_dir"], merged["model.timeout"])
    except ValueError as exc:
        raise InvalidValue("model", str(exc)) from None

    return PipelineConfig(
        index_path=merged["index_path"],
        compile_db_path=merged["compile_db_path"],
        embedder=embedder,
        model=model,
        top_k=merged["top_k"],
        min_score=merged["min_score"],
        char_budget=merged["char_budget"],
        general_instructions_path=merged["general_instructions_path"],
        run_root=merged["run_root"],
    )
