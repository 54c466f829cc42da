"""Optional on-disk result cache.

Disabled unless a directory is supplied.  One JSON file per key; every
file carries a versioned header (format tag, format version, code
version, and the full key) that must match exactly on read, so stale
entries from older code degrade to cache misses instead of wrong
answers.  Payloads are plain JSON with exact integers throughout.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

FORMAT_TAG = "burnside-cache"
FORMAT_VERSION = 1

try:
    from importlib.metadata import version as _dist_version

    CODE_VERSION = _dist_version("burnside")
except Exception:  # pragma: no cover - uninstalled source tree
    CODE_VERSION = "0.1.0"


def _canonical(key: dict) -> str:
    return json.dumps(key, sort_keys=True, separators=(",", ":"))


def key_filename(key: dict) -> str:
    digest = hashlib.sha256(_canonical(key).encode()).hexdigest()
    return digest[:32] + ".json"


class ResultCache:
    """Directory-backed store mapping key dicts to JSON payloads."""

    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def _path(self, key: dict) -> str:
        return os.path.join(self.directory, key_filename(key))

    def get(self, key: dict):
        """Payload for key, or None on miss or any header mismatch."""
        path = self._path(key)
        try:
            with open(path, encoding="utf-8") as fh:
                entry = json.load(fh)
        except (OSError, ValueError):
            return None
        if not isinstance(entry, dict):
            return None
        header_ok = (
            entry.get("format") == FORMAT_TAG
            and entry.get("format_version") == FORMAT_VERSION
            and entry.get("code_version") == CODE_VERSION
            and entry.get("key") == key
        )
        if not header_ok:
            return None
        return entry.get("payload")

    def put(self, key: dict, payload) -> None:
        entry = {
            "format": FORMAT_TAG,
            "format_version": FORMAT_VERSION,
            "code_version": CODE_VERSION,
            "key": key,
            "payload": payload,
        }
        # Write-then-rename so a crashed run never leaves a torn file.
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(entry, fh, sort_keys=True)
            os.replace(tmp, self._path(key))
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise
