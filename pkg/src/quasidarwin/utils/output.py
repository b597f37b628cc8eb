"""Atomic, deterministic result writers.

Every file is rendered fully in memory, written to a sibling temp file, fsynced and
renamed over the destination, so readers never observe a half-written output. JSON is
rendered with sorted keys and a fixed indent, and manifests carry no timestamps: rerunning
a manifest reproduces every output byte for byte.
"""

import csv
import io
import json
import logging
import os
from collections.abc import Iterable, Mapping
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from quasidarwin.core.exceptions import OutputError
from quasidarwin.utils.serialization import to_json_serializable

__all__ = [
    "MANIFEST_NAME",
    "artifact_version",
    "dumps_json",
    "render_csv",
    "write_csv",
    "write_json",
    "write_manifest",
    "write_text",
]

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def artifact_version() -> str:
    """Installed package version, or ``"0+unknown"`` when running from a source tree."""
    try:
        return version("quasidarwin")
    except PackageNotFoundError:
        return "0+unknown"


def dumps_json(data: object) -> str:
    """Render ``data`` as deterministic JSON text (sorted keys, 2-space indent, trailing newline)."""
    return json.dumps(to_json_serializable(data), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_csv(rows: Iterable[Mapping[str, object]], fieldnames: list[str]) -> str:
    """Render dict rows as CSV text with ``\\n`` line endings."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def write_text(path: Path, text: str) -> Path:
    """Atomically write ``text`` to ``path``.

    Raises:
        OutputError: If the destination directory cannot be created or written.
    """
    path = Path(path)
    temp_file = path.with_name(path.name + ".tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(temp_file, "w", encoding="utf-8", newline="") as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        temp_file.replace(path)
    except OSError as e:
        if temp_file.exists():
            temp_file.unlink()
        raise OutputError(f"cannot write {path}: {e.strerror or e}") from e

    logger.debug("Wrote %s (%d bytes)", path, len(text))
    return path


def write_json(path: Path, data: object) -> Path:
    """Atomically write deterministic JSON."""
    return write_text(path, dumps_json(data))


def write_csv(path: Path, rows: Iterable[Mapping[str, object]], fieldnames: list[str]) -> Path:
    """Atomically write CSV rows."""
    return write_text(path, render_csv(rows, fieldnames))


def write_manifest(out_dir: Path, config: object, seed: int, outputs: list[Path]) -> Path:
    """Write ``manifest.json`` describing a run next to its outputs.

    The manifest holds the fully resolved config, the seed and the package version, so
    ``quasidarwin <command> --config manifest.json`` reruns the exact same workflow.
    """
    out_dir = Path(out_dir)
    manifest = {
        "config": config,
        "seed": seed,
        "version": artifact_version(),
        "outputs": sorted(Path(p).relative_to(out_dir).as_posix() for p in outputs),
    }
    return write_json(out_dir / MANIFEST_NAME, manifest)
