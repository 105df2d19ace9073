"""Durable relay state: append-only conversation logs, content-addressed audio
blobs, and per-user queues for deliveries to offline peers.

Conversation logs are JSON-lines files appended under a per-conversation
lock; replay after a restart reproduces the envelopes byte-identically
because every envelope serializes canonically (sorted keys, compact
separators).
"""

from __future__ import annotations

import json
import threading
from collections import defaultdict
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterator

from .errors import UnknownConversation


@dataclass(frozen=True)
class MessageEnvelope:
    message_id: str
    conversation_id: str
    sender: str
    audio_digest: str
    duration_ms: int
    teaser_id: str
    modality: str
    sent_at: int  # UTC milliseconds

    def as_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "MessageEnvelope":
        return cls(**json.loads(line))

    def parties(self) -> tuple[str, ...]:
        return tuple(self.conversation_id.split(":"))


class ConversationStore:
    def __init__(self, root: Path):
        self.root = Path(root)
        self._conversations = self.root / "conversations"
        self._blobs = self.root / "blobs"
        self._queues = self.root / "queues"
        for directory in (self._conversations, self._blobs, self._queues):
            directory.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._registry_lock = threading.Lock()

    def _lock_for(self, key: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks[key]

    # --- conversation logs ---

    def _log_path(self, conversation_id: str) -> Path:
        return self._conversations / f"{conversation_id}.jsonl"

    def append(self, envelope: MessageEnvelope) -> None:
        path = self._log_path(envelope.conversation_id)
        with self._lock_for(f"log:{envelope.conversation_id}"):
            with open(path, "a", encoding="utf-8") as f:
                f.write(envelope.to_json() + "\n")
                f.flush()

    def replay(self, conversation_id: str) -> list[MessageEnvelope]:
        path = self._log_path(conversation_id)
        if not path.exists():
            raise UnknownConversation(conversation_id)
        with self._lock_for(f"log:{conversation_id}"):
            lines = path.read_text(encoding="utf-8").splitlines()
        return [MessageEnvelope.from_json(line) for line in lines if line]

    def conversation_ids(self) -> list[str]:
        return sorted(p.stem for p in self._conversations.glob("*.jsonl"))

    def all_envelopes(self) -> Iterator[MessageEnvelope]:
        for conversation_id in self.conversation_ids():
            yield from self.replay(conversation_id)

    # --- content-addressed audio blobs ---

    def _blob_path(self, digest: str) -> Path:
        return self._blobs / f"{digest}.wav"

    def put_blob(self, digest: str, wav_bytes: bytes) -> None:
        path = self._blob_path(digest)
        if path.exists():
            return  # content-addressed: same digest, same bytes
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(wav_bytes)
        tmp.replace(path)

    def get_blob(self, digest: str) -> bytes | None:
        path = self._blob_path(digest)
        return path.read_bytes() if path.exists() else None

    # --- offline-delivery queues ---

    def _queue_path(self, user_id: str) -> Path:
        return self._queues / f"{user_id}.jsonl"

    def enqueue_delivery(self, user_id: str, envelope: MessageEnvelope) -> None:
        with self._lock_for(f"queue:{user_id}"):
            with open(self._queue_path(user_id), "a", encoding="utf-8") as f:
                f.write(envelope.to_json() + "\n")
                f.flush()

    def drain_queue(self, user_id: str) -> list[MessageEnvelope]:
        """Return and clear the user's queued deliveries (exactly-once handoff)."""
        path = self._queue_path(user_id)
        with self._lock_for(f"queue:{user_id}"):
            if not path.exists():
                return []
            lines = path.read_text(encoding="utf-8").splitlines()
            path.unlink()
        return [MessageEnvelope.from_json(line) for line in lines if line]
