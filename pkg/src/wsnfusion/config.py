"""Flat ``key = value`` configuration files.

Values are JSON literals (numbers, strings, lists, ``null``); bare words are
read as strings. ``#`` starts a comment line. Keys prefixed ``manifest.``
carry run metadata and are ignored when a manifest is reused as a config.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

META_PREFIX = "manifest."


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def parse_value(text: str) -> Any:
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def format_value(value: Any) -> str:
    if isinstance(value, tuple):
        value = list(value)
    return json.dumps(value)


def read_config(path) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw!r}")
        key = key.strip()
        if key in out:
            raise ConfigError(key, f"duplicate key on line {lineno}")
        out[key] = parse_value(value)
    return out


def write_config(values: Mapping[str, Any], path, header: str | None = None) -> None:
    lines = [f"# {header}"] if header else []
    lines += [f"{k} = {format_value(v)}" for k, v in values.items()]
    Path(path).write_text("\n".join(lines) + "\n")
