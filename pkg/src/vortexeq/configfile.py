"""Line-based key=value configuration files.

Format: one ``key = value`` pair per line; blank lines and lines starting
with ``#`` are ignored; inline ``#`` comments are stripped. Values stay
strings; callers convert.
"""

from __future__ import annotations

import os


def load_config(path: str | os.PathLike) -> dict[str, str]:
    entries: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line.strip()!r}")
            key, value = text.split("=", 1)
            key = key.strip()
            if not key:
                raise ValueError(f"{path}:{lineno}: empty key")
            entries[key] = value.strip()
    return entries


def get_float(cfg: dict[str, str], key: str, default: float) -> float:
    return float(cfg[key]) if key in cfg else default


def get_int(cfg: dict[str, str], key: str, default: int) -> int:
    return int(cfg[key]) if key in cfg else default
