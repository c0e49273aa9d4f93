"""
Content-addressed JSON cache for assembled associators and normal-form tables.
"""

import hashlib
import json
import logging
from pathlib import Path

logger = logging.getLogger(__name__)

CACHE_FORMAT = "kzassoc.cache/1"


def cache_key(kind, params):
    """SHA-256 of the canonical JSON of ``kind`` and ``params``."""
    canonical = json.dumps({"kind": kind, "params": params, "format": CACHE_FORMAT},
                           sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class DiskCache:
    """Stores one JSON file per key under ``directory``.

    An entry whose embedded key differs from the expected one is stale: it is
    ignored (and later overwritten) rather than trusted.
    """

    def __init__(self, directory):
        self.directory = Path(directory)

    def _path(self, kind, key):
        return self.directory / f"{kind}-{key[:24]}.json"

    def get(self, kind, params):
        key = cache_key(kind, params)
        path = self._path(kind, key)
        if not path.is_file():
            return None
        try:
            entry = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            logger.warning("unreadable cache entry", extra={"data": {"path": str(path),
                                                                      "error": str(exc)}})
            return None
        if entry.get("key") != key:
            logger.warning("stale cache entry ignored", extra={"data": {"path": str(path)}})
            return None
        logger.debug("cache hit", extra={"data": {"kind": kind, "path": str(path)}})
        return entry["payload"]

    def put(self, kind, params, payload):
        key = cache_key(kind, params)
        path = self._path(kind, key)
        self.directory.mkdir(parents=True, exist_ok=True)
        entry = {"key": key, "kind": kind, "params": params, "payload": payload}
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(entry, sort_keys=True) + "\n", encoding="utf-8")
        tmp.replace(path)
        logger.debug("cache stored", extra={"data": {"kind": kind, "path": str(path)}})
        return path
