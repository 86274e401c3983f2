"""Flat ``key = value`` experiment configs with ``#`` comments."""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Any, Callable, Mapping


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Key:
    type: Callable[[str], Any]
    default: Any
    help: str = ""


def parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {n}: empty key")
        if key in out:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        out[key] = value
    return out


def read_config(path) -> dict[str, str]:
    if not os.path.exists(path):
        raise FileNotFoundError(f"config file not found: {path}")
    with open(path) as fh:
        return parse_config_text(fh.read())


def resolve(schema: Mapping[str, Key], file_values: Mapping[str, str] | None = None,
            overrides: Mapping[str, Any] | None = None) -> dict[str, Any]:
    """Defaults, then config-file values, then explicit overrides; unknown keys are rejected."""
    file_values = file_values or {}
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    for source in (file_values, overrides):
        unknown = sorted(set(source) - set(schema))
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    out = {}
    for name, key in schema.items():
        if name in overrides:
            value = overrides[name]
        elif name in file_values:
            try:
                value = key.type(file_values[name])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {name!r}: {exc}") from None
        else:
            value = key.default
        out[name] = value
    return out


def format_config(values: Mapping[str, Any], experiment: str | None = None) -> str:
    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, bool):
            return str(v).lower()
        return repr(float(v)) if isinstance(v, float) else str(v)

    lines = [f"# resolved configuration for {experiment}"] if experiment else []
    lines += [f"{k} = {fmt(v)}" for k, v in values.items()]
    return "\n".join(lines) + "\n"
