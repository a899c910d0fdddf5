"""On-disk cache of simulated critical-value surfaces.

Each surface is stored as one JSON record holding the surface, a format
version and a SHA-256 checksum of the canonical surface encoding.
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path

from ..errors import IoFailure, SchemaMismatch
from .tables import CriticalValueSurface

logger = logging.getLogger(__name__)

CACHE_FORMAT = "energy-econometrics/critical-value-surface"
CACHE_VERSION = 1


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)


def surface_key(surface: CriticalValueSurface) -> str:
    """Stable file stem; changes with the spec key, the sample and the provenance."""
    identity = {
        "test_family": surface.test_family.value,
        "spec_key": surface.spec_key,
        "sample_size": surface.sample_size,
        "break_fractions": list(surface.break_fractions),
        "provenance": surface.provenance.to_dict(),
    }
    digest = hashlib.sha256(_canonical(identity).encode("utf-8")).hexdigest()[:16]
    return f"{surface.test_family.value}-{digest}"


def surface_cache_store(surface: CriticalValueSurface, cache_dir: Path) -> Path:
    body = surface.to_dict()
    record = {
        "format": CACHE_FORMAT,
        "version": CACHE_VERSION,
        "checksum": hashlib.sha256(_canonical(body).encode("utf-8")).hexdigest(),
        "surface": body,
    }
    path = Path(cache_dir) / f"{surface_key(surface)}.json"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(record, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write critical-value cache {path}: {exc}") from exc
    logger.info("Stored %s %r surface in %s", surface.test_family.value, surface.spec_key, path)
    return path


def surface_cache_load(path: Path) -> CriticalValueSurface:
    path = Path(path)
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read critical-value cache {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path} is not a JSON record: {exc}") from exc

    if not isinstance(record, dict) or record.get("format") != CACHE_FORMAT:
        raise SchemaMismatch(f"{path} is not a critical-value cache record")
    if record.get("version") != CACHE_VERSION:
        raise SchemaMismatch(f"{path} has cache version {record.get('version')!r}, expected {CACHE_VERSION}")
    body = record.get("surface")
    if not isinstance(body, dict):
        raise SchemaMismatch(f"{path} holds no surface")
    checksum = hashlib.sha256(_canonical(body).encode("utf-8")).hexdigest()
    if checksum != record.get("checksum"):
        raise SchemaMismatch(f"{path} failed its integrity check")
    try:
        return CriticalValueSurface.from_dict(body)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaMismatch(f"{path} holds a malformed surface: {exc}") from exc


def cached_surfaces(cache_dir: Path) -> tuple[CriticalValueSurface, ...]:
    """Every valid surface under ``cache_dir``; unreadable records are skipped."""
    directory = Path(cache_dir)
    if not directory.is_dir():
        return ()
    surfaces = []
    for path in sorted(directory.glob("*.json")):
        try:
            surfaces.append(surface_cache_load(path))
        except (IoFailure, SchemaMismatch) as exc:
            logger.warning("Ignoring cached surface: %s", exc)
    return tuple(surfaces)
