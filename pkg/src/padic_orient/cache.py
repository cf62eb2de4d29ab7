"""Content-addressed disk cache for Eisenstein q-expansions.

Entries are the QExpansion JSON serialization keyed by a sha256 of the
parameter key.  Writes go to a temp file in the same directory followed by
os.replace, so readers never see partial files.
"""
from __future__ import annotations

import hashlib
import json
import os
import shutil
import tempfile
from pathlib import Path

from .eisenstein import NORMALIZATION
from .qseries import QExpansion

__all__ = ["DiskCache", "default_cache_dir", "ENV_VAR"]

ENV_VAR = "PADIC_ORIENT_CACHE"
FORMAT_VERSION = 1


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "padic_orient"


class DiskCache:
    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root else default_cache_dir()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(k: int, chi, Q: int, ring) -> dict:
        return {
            "kind": "eisenstein",
            "version": FORMAT_VERSION,
            "normalization": NORMALIZATION,
            "k": k,
            "chi": chi.name,
            "Q": Q,
            "ring": ring.to_json(),
        }

    def _path(self, key: dict) -> Path:
        digest = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()
        return self.root / digest[:2] / f"{digest}.json"

    def get(self, key: dict) -> QExpansion | None:
        path = self._path(key)
        try:
            obj = json.loads(path.read_text())
        except (OSError, ValueError):
            return None
        if obj.get("key") != key:
            return None
        return QExpansion.from_json(obj["value"])

    def put(self, key: dict, value: QExpansion):
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = json.dumps({"key": key, "value": value.to_json()}, sort_keys=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(payload)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def fetch_eisenstein(self, k: int, chi, Q: int, ring, compute):
        key = self.key(k, chi, Q, ring)
        hit = self.get(key)
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        value = compute()
        self.put(key, value)
        return value

    def clear(self) -> int:
        n = len(list(self.root.glob("*/*.json"))) if self.root.exists() else 0
        if self.root.exists():
            shutil.rmtree(self.root)
        return n

    def stat(self) -> dict:
        files = list(self.root.glob("*/*.json")) if self.root.exists() else []
        return {
            "root": str(self.root),
            "entries": len(files),
            "bytes": sum(f.stat().st_size for f in files),
        }
