"""Reproducibility manifests written alongside every CLI output set."""

from __future__ import annotations

import datetime
import hashlib
import json
import os
import tempfile
from pathlib import Path

from . import __version__

MANIFEST_NAME = "manifest.json"


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def utcnow() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def write_manifest(
    out_dir,
    command: list[str],
    parameters: dict,
    tolerances: dict,
    seeds: list[int],
    outputs: list[str | os.PathLike],
    started: str,
) -> Path:
    """Digest the output files and atomically write manifest.json next to them."""
    out_dir = Path(out_dir)
    payload = {
        "tool": "vortexeq",
        "tool_version": __version__,
        "command": command,
        "parameters": parameters,
        "tolerances": tolerances,
        "seeds": seeds,
        "started": started,
        "finished": utcnow(),
        "outputs": {Path(p).name: sha256_file(p) for p in outputs},
    }
    fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=".manifest-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        target = out_dir / MANIFEST_NAME
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target
