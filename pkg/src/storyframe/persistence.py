"""File-backed session storage with corruption detection.

One JSON file per session. Writes go to a temp file that is fsynced and
renamed over the target, so a crash leaves either the old version or the new
one, never a torn file. Every payload is wrapped with a digest of its
canonical bytes; any mismatch on load (truncation, editing, bit rot) raises
``CorruptSession`` instead of returning bad state.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
from pathlib import Path
from typing import Any

from .errors import CorruptSession

_SESSION_ID_RE = re.compile(r"^[A-Za-z0-9_-]+$")


class SessionStore:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, session_id: str) -> Path:
        if not _SESSION_ID_RE.match(session_id):
            raise ValueError(f"bad session id {session_id!r}")
        return self.root / f"{session_id}.json"

    def save(self, session_id: str, payload: dict[str, Any]) -> None:
        path = self._path(session_id)
        body = json.dumps(payload, sort_keys=True, ensure_ascii=False)
        digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
        wrapped = json.dumps({"digest": digest, "payload": payload}, sort_keys=True, ensure_ascii=False)
        fd, tmp_name = tempfile.mkstemp(dir=self.root, prefix=f".{session_id}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(wrapped)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp_name, path)
        except BaseException:
            try:
                os.unlink(tmp_name)
            except FileNotFoundError:
                pass
            raise

    def load(self, session_id: str) -> dict[str, Any]:
        path = self._path(session_id)
        if not path.exists():
            raise KeyError(session_id)
        raw = path.read_text(encoding="utf-8")
        try:
            wrapped = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorruptSession(f"session {session_id} is not valid JSON: {exc}") from None
        if not isinstance(wrapped, dict) or "digest" not in wrapped or "payload" not in wrapped:
            raise CorruptSession(f"session {session_id} is missing its integrity envelope")
        payload = wrapped["payload"]
        body = json.dumps(payload, sort_keys=True, ensure_ascii=False)
        digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
        if digest != wrapped["digest"]:
            raise CorruptSession(f"session {session_id} failed its integrity check")
        return payload

    def exists(self, session_id: str) -> bool:
        return self._path(session_id).exists()

    def delete(self, session_id: str) -> None:
        path = self._path(session_id)
        if path.exists():
            path.unlink()

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))
