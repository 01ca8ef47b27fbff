"""Crash-safe file primitives shared by the campaign store and caches.

All persistent writes go through ``atomic_write_text``: content lands in
a uniquely named sibling temp file and is moved into place with
``os.replace``, so an interrupted write leaves either the old file or
the new one, never a torn file.
"""

from __future__ import annotations

import json
import os
import uuid
from pathlib import Path


class LockHeldError(RuntimeError):
    """Another live process holds the campaign writer lock."""


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f"{path.name}.tmp-{os.getpid()}-{uuid.uuid4().hex[:8]}")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink(missing_ok=True)


def atomic_write_json(path: Path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path: Path):
    with path.open(encoding="utf-8") as fh:
        return json.load(fh)


def _pid_alive(pid: int) -> bool:
    try:
        os.kill(pid, 0)
    except ProcessLookupError:
        return False
    except PermissionError:
        return True
    return True


class CampaignLock:
    """Advisory single-writer lock: a lock file holding the owner pid.

    A lock left behind by a dead process is stolen silently; a lock held
    by a live process raises LockHeldError.
    """

    def __init__(self, root: Path):
        self.path = Path(root) / "campaign.lock"

    def acquire(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        while True:
            try:
                fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            except FileExistsError:
                try:
                    owner = int(self.path.read_text().strip() or "0")
                except (OSError, ValueError):
                    owner = 0
                if owner and owner != os.getpid() and _pid_alive(owner):
                    raise LockHeldError(f"campaign locked by pid {owner} ({self.path})")
                if owner == os.getpid():
                    return
                self.path.unlink(missing_ok=True)
                continue
            with os.fdopen(fd, "w") as fh:
                fh.write(str(os.getpid()))
            return

    def release(self) -> None:
        try:
            owner = int(self.path.read_text().strip() or "0")
        except (OSError, ValueError):
            return
        if owner == os.getpid():
            self.path.unlink(missing_ok=True)

    def __enter__(self) -> "CampaignLock":
        self.acquire()
        return self

    def __exit__(self, *exc) -> None:
        self.release()
