"""Append-only event persistence for the annotation service.

All state changes are recorded as JSON events in a single log file; a
snapshot file caches the derived state so restarts need only replay the
tail. The log is the source of truth and is never rewritten.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Callable, Iterator

from ..errors import DataContractError


class EventLog:
    """A numbered, append-only JSONL event stream with a state snapshot."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.log_path = self.directory / "events.jsonl"
        self.snapshot_path = self.directory / "snapshot.json"
        self._lock = threading.Lock()
        self._seq = 0
        self._handle = None

    def load_snapshot(self) -> dict | None:
        if not self.snapshot_path.exists():
            return None
        with self.snapshot_path.open(encoding="utf-8") as fh:
            snap = json.load(fh)
        if "seq" not in snap or "state" not in snap:
            raise DataContractError("snapshot file lacks seq/state fields")
        return snap

    def replay(self, after_seq: int = 0) -> Iterator[dict]:
        """Yield stored events with seq > after_seq, tracking the counter."""
        self._seq = max(self._seq, after_seq)
        if not self.log_path.exists():
            return
        with self.log_path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    event = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DataContractError(
                        f"{self.log_path}:{lineno}: corrupt event: {exc}"
                    ) from exc
                seq = event.get("seq")
                if not isinstance(seq, int):
                    raise DataContractError(f"{self.log_path}:{lineno}: event lacks seq")
                self._seq = max(self._seq, seq)
                if seq > after_seq:
                    yield event

    def append(self, event: dict) -> dict:
        """Assign the next sequence number, persist, and return the event."""
        with self._lock:
            self._seq += 1
            event = dict(event, seq=self._seq)
            if self._handle is None:
                self._handle = self.log_path.open("a", encoding="utf-8", newline="\n")
            self._handle.write(json.dumps(event, sort_keys=True, ensure_ascii=False))
            self._handle.write("\n")
            self._handle.flush()
            return event

    def write_snapshot(self, state_fn: Callable[[], dict]) -> None:
        with self._lock:
            payload = {"seq": self._seq, "state": state_fn()}
        tmp = self.snapshot_path.with_suffix(".json.tmp")
        tmp.write_text(
            json.dumps(payload, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        tmp.replace(self.snapshot_path)

    @property
    def seq(self) -> int:
        return self._seq

    def close(self) -> None:
        with self._lock:
            if self._handle is not None:
                self._handle.close()
                self._handle = None
