"""Small file helpers shared by the exporters."""

from __future__ import annotations

import json
import os
import tempfile


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a temporary sibling, then rename it over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_manifest(path: str | os.PathLike, manifest: dict) -> None:
    atomic_write(os.fspath(path) + ".manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
