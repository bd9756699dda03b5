"""Line-oriented ``key = value`` text files.

Shared by config files and model file headers. Blank lines and lines
starting with ``#`` are ignored; keys may not repeat.
"""
from __future__ import annotations

from pathlib import Path

from .errors import ValidationError


def parse_kv(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ValidationError(f"line {lineno}: empty key")
        if key in pairs:
            raise ValidationError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def format_kv(pairs: dict[str, str]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in pairs.items())


def read_kv(path) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e}") from e
    return parse_kv(text)


def write_kv(path, pairs: dict[str, str]) -> None:
    Path(path).write_text(format_kv(pairs))


def require(pairs: dict[str, str], key: str) -> str:
    if key not in pairs:
        raise ValidationError(f"missing required key {key!r}")
    return pairs[key]


def as_float(pairs: dict[str, str], key: str) -> float:
    value = require(pairs, key)
    try:
        return float(value)
    except ValueError as e:
        raise ValidationError(f"key {key!r}: not a number: {value!r}") from e


def as_int(pairs: dict[str, str], key: str) -> int:
    value = require(pairs, key)
    try:
        return int(value)
    except ValueError as e:
        raise ValidationError(f"key {key!r}: not an integer: {value!r}") from e
