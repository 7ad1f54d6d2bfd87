"""Content-addressed JSON cache for computed groups, classes and tables.

Keys hash the schema version, an algorithm version, the payload kind and
the identifying parts (degree, tier, generator digest), so any change to
the computation invalidates old entries instead of shadowing them.  Writes
go through a temp file and an atomic rename; a failed or concurrent write
can therefore never leave a torn entry behind.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from hashlib import blake2b
from pathlib import Path

SCHEMA_VERSION = 1
# bump when enumeration or cohomology output changes shape or meaning
ALGORITHM_VERSION = 1

ENV_VAR = "LOGK3_CACHE_DIR"


def default_cache_dir() -> Path:
    override = os.environ.get(ENV_VAR)
    if override:
        return Path(override)
    base = os.environ.get("XDG_CACHE_HOME")
    root = Path(base) if base else Path.home() / ".cache"
    return root / "logk3"


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


class ResultCache:
    """Directory of {key}.json files addressed by content keys."""

    def __init__(self, root: str | Path | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def key(self, kind: str, **parts) -> str:
        blob = canonical_json(
            {
                "schema": SCHEMA_VERSION,
                "algorithm": ALGORITHM_VERSION,
                "kind": kind,
                "parts": parts,
            }
        )
        return blake2b(blob.encode(), digest_size=12).hexdigest()

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str):
        """The stored payload, or None on miss, version skew or corruption."""
        path = self._path(key)
        try:
            with open(path, encoding="utf-8") as fh:
                entry = json.load(fh)
        except (OSError, json.JSONDecodeError):
            return None
        if entry.get("schema_version") != SCHEMA_VERSION:
            return None
        if entry.get("algorithm_version") != ALGORITHM_VERSION:
            return None
        return entry.get("payload")

    def put(self, key: str, kind: str, payload) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        entry = {
            "schema_version": SCHEMA_VERSION,
            "algorithm_version": ALGORITHM_VERSION,
            "kind": kind,
            "written": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "payload": payload,
        }
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(entry, fh, sort_keys=True, separators=(",", ":"))
            os.replace(tmp, self._path(key))
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def ls(self) -> list[dict]:
        if not self.root.is_dir():
            return []
        out = []
        for path in sorted(self.root.glob("*.json")):
            row = {"key": path.stem, "size": path.stat().st_size}
            try:
                with open(path, encoding="utf-8") as fh:
                    entry = json.load(fh)
                row["kind"] = entry.get("kind")
                row["written"] = entry.get("written")
            except (OSError, json.JSONDecodeError):
                row["kind"] = "corrupt"
            out.append(row)
        return out

    def clear(self) -> int:
        if not self.root.is_dir():
            return 0
        removed = 0
        for path in self.root.glob("*.json"):
            try:
                path.unlink()
                removed += 1
            except OSError:
                pass
        return removed


class CacheCheckpoint:
    """load/save adapter feeding enumeration layer snapshots to a cache."""

    def __init__(self, cache: ResultCache, key: str):
        self.cache = cache
        self.key = key

    def load(self):
        return self.cache.get(self.key)

    def save(self, state) -> None:
        self.cache.put(self.key, "enumeration-checkpoint", state)
