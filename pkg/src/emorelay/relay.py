"""The relay core: sessions, pairing, upload analysis, message delivery.

Transport-agnostic: each connection is a Session whose channel knows how to
push frames back to the client. The WebSocket endpoint (service.app) feeds
inbound frames to handle_frame and tears the session down on disconnect.

Classification work runs on worker threads so one upload never delays
frames on other sessions.
"""

from __future__ import annotations

import asyncio
import re
import time
import uuid
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Awaitable, Callable, Protocol

from .audio import AudioClip, clip_digest, encode_wav, parse_wav
from .catalog import Catalog, resolve
from .emotions import EMOTIONS
from .errors import (
    AlreadyPaired,
    DuplicateUser,
    EmorelayError,
    Forbidden,
    MalformedFrame,
    NotPaired,
    PeerUnavailable,
    UnknownMessage,
    UnknownUpload,
    UploadExpired,
    UploadRejected,
)
from .pipeline import AnalysisResult, EmotionPipeline
from .protocol import (
    KIND_BINARY,
    KIND_JSON,
    T_AUDIO,
    T_BYE,
    T_DELIVER,
    T_FETCH_AUDIO,
    T_HELLO,
    T_HELLO_OK,
    T_PAIR,
    T_PAIRED,
    T_RECOMMENDATION,
    T_SEND,
    T_SEND_OK,
    T_UPLOAD_META,
    Frame,
    binary_frame,
    error_message,
    json_frame,
)
from .store import ConversationStore, MessageEnvelope

USER_ID_PATTERN = re.compile(r"^[A-Za-z0-9_.-]{1,64}$")

DEFAULT_UPLOAD_TTL_S = 300.0
DEFAULT_DURATION_CAP_S = 120.0


class Channel(Protocol):
    async def send_frames(self, frames: list[Frame]) -> None: ...


@dataclass
class PendingUpload:
    upload_id: str
    clip: AudioClip
    analysis: AnalysisResult
    expires_at_ms: int


@dataclass
class Session:
    channel: Channel
    user_id: str | None = None
    paired_with: str | None = None
    pending_uploads: dict[str, PendingUpload] = field(default_factory=dict)
    awaiting_audio: bool = False
    proposed_upload_id: str | None = None


def conversation_id_for(a: str, b: str) -> str:
    return ":".join(sorted((a, b)))


def now_ms() -> int:
    return time.time_ns() // 1_000_000


class RelayServer:
    def __init__(
        self,
        catalog: Catalog,
        pipeline: EmotionPipeline,
        store: ConversationStore,
        upload_ttl_s: float = DEFAULT_UPLOAD_TTL_S,
        duration_cap_s: float = DEFAULT_DURATION_CAP_S,
        clock: Callable[[], int] = now_ms,
    ):
        self.catalog = catalog
        self.pipeline = pipeline
        self.store = store
        self.upload_ttl_s = upload_ttl_s
        self.duration_cap_s = duration_cap_s
        self.clock = clock
        self.sessions: dict[str, Session] = {}
        self._messages: dict[str, MessageEnvelope] = {
            envelope.message_id: envelope for envelope in store.all_envelopes()
        }
        self._conversation_locks: dict[str, asyncio.Lock] = defaultdict(asyncio.Lock)
        self._last_sent_at: dict[str, int] = {}

    # --- session lifecycle ---

    def new_session(self, channel: Channel) -> Session:
        return Session(channel=channel)

    async def disconnect(self, session: Session) -> None:
        if session.user_id is not None and self.sessions.get(session.user_id) is session:
            del self.sessions[session.user_id]
        session.pending_uploads.clear()

    # --- frame dispatch ---

    async def handle_frame(self, session: Session, frame: Frame) -> bool:
        """Process one inbound frame; False means the connection must close."""
        try:
            if frame.kind == KIND_BINARY:
                await self._handle_audio_payload(session, frame.payload)
                return True
            message = frame.message()
            kind = message["type"]
            if session.user_id is None and kind != T_HELLO:
                raise MalformedFrame(f"{kind} before HELLO")
            if kind == T_HELLO:
                await self._handle_hello(session, message)
            elif kind == T_PAIR:
                await self._handle_pair(session, message)
            elif kind == T_UPLOAD_META:
                await self._handle_upload_meta(session, message)
            elif kind == T_SEND:
                await self._handle_send(session, message)
            elif kind == T_FETCH_AUDIO:
                await self._handle_fetch_audio(session, message)
            elif kind == T_BYE:
                return False
            else:
                raise MalformedFrame(f"unknown message type {kind!r}")
            return True
        except (MalformedFrame, DuplicateUser) as exc:
            # protocol-fatal: report and drop the connection
            await self._send_error(session, exc)
            return False
        except EmorelayError as exc:
            await self._send_error(session, exc)
            return True

    async def _send_error(self, session: Session, exc: EmorelayError) -> None:
        await session.channel.send_frames([json_frame(error_message(exc.code, str(exc)))])

    # --- handlers ---

    async def _handle_hello(self, session: Session, message: dict) -> None:
        user_id = message.get("user_id")
        if not isinstance(user_id, str) or not USER_ID_PATTERN.match(user_id):
            raise MalformedFrame("HELLO needs a user_id of 1-64 chars [A-Za-z0-9_.-]")
        if session.user_id is not None:
            raise MalformedFrame("second HELLO on one connection")
        if user_id in self.sessions:
            raise DuplicateUser(user_id)
        session.user_id = user_id
        self.sessions[user_id] = session
        await session.channel.send_frames(
            [
                json_frame(
                    {
                        "type": T_HELLO_OK,
                        "catalog_version": self.catalog.version,
                        "emotions": list(EMOTIONS),
                    }
                )
            ]
        )
        # flush deliveries queued while this user was offline, in queue order
        for envelope in self.store.drain_queue(user_id):
            await self._push_deliver(session, envelope)

    async def _handle_pair(self, session: Session, message: dict) -> None:
        peer_id = message.get("peer_id")
        assert session.user_id is not None
        if not isinstance(peer_id, str) or not peer_id or peer_id == session.user_id:
            raise MalformedFrame("PAIR needs a peer_id different from your own")
        if session.paired_with is not None and session.paired_with != peer_id:
            raise AlreadyPaired(f"already paired with {session.paired_with}")
        peer = self.sessions.get(peer_id)
        if peer is None:
            raise PeerUnavailable(peer_id)
        if peer.paired_with is not None and peer.paired_with != session.user_id:
            raise AlreadyPaired(f"{peer_id} is already paired")
        session.paired_with = peer_id
        peer.paired_with = session.user_id
        conversation_id = conversation_id_for(session.user_id, peer_id)
        paired = json_frame({"type": T_PAIRED, "conversation_id": conversation_id})
        await session.channel.send_frames([paired])
        await peer.channel.send_frames([paired])

    async def _handle_upload_meta(self, session: Session, message: dict) -> None:
        if session.paired_with is None:
            raise NotPaired("pair with a peer before uploading")
        upload_id = message.get("upload_id")
        if upload_id is not None and (
            not isinstance(upload_id, str) or not USER_ID_PATTERN.match(upload_id)
        ):
            raise MalformedFrame("upload_id must be 1-64 chars [A-Za-z0-9_.-]")
        session.proposed_upload_id = upload_id
        session.awaiting_audio = True

    async def _handle_audio_payload(self, session: Session, payload: bytes) -> None:
        if session.user_id is None or not session.awaiting_audio:
            raise MalformedFrame("binary frame without a preceding UPLOAD_META")
        session.awaiting_audio = False
        proposed = session.proposed_upload_id
        session.proposed_upload_id = None
        if session.paired_with is None:
            raise NotPaired("pair with a peer before uploading")

        try:
            clip = parse_wav(payload)
        except EmorelayError as exc:
            raise UploadRejected(f"{exc.code}: {exc}") from exc
        if clip.duration_ms > self.duration_cap_s * 1000:
            raise UploadRejected(
                f"DURATION_CAP: {clip.duration_ms} ms exceeds {self.duration_cap_s:.0f} s"
            )

        # classification runs off the event loop; other sessions keep flowing
        analysis = await asyncio.to_thread(self.pipeline.analyze, clip)

        upload_id = proposed or uuid.uuid4().hex
        session.pending_uploads[upload_id] = PendingUpload(
            upload_id=upload_id,
            clip=clip,
            analysis=analysis,
            expires_at_ms=self.clock() + int(self.upload_ttl_s * 1000),
        )
        await session.channel.send_frames(
            [
                json_frame(
                    {
                        "type": T_RECOMMENDATION,
                        "upload_id": upload_id,
                        "order": [EMOTIONS[i] for i in analysis.recommendation.order],
                        "probs": list(analysis.recommendation.fused.probs),
                        "modality": analysis.modality,
                    }
                )
            ]
        )

    async def _handle_send(self, session: Session, message: dict) -> None:
        assert session.user_id is not None
        upload_id = message.get("upload_id")
        teaser_id = message.get("teaser_id")
        if not isinstance(upload_id, str) or not isinstance(teaser_id, str):
            raise MalformedFrame("SEND needs upload_id and teaser_id strings")
        pending = session.pending_uploads.get(upload_id)
        if pending is None:
            raise UnknownUpload(upload_id)
        if self.clock() >= pending.expires_at_ms:
            del session.pending_uploads[upload_id]
            raise UploadExpired(upload_id)
        resolve(self.catalog, teaser_id)
        if session.paired_with is None:
            raise NotPaired("no peer to deliver to")

        peer_id = session.paired_with
        conversation_id = conversation_id_for(session.user_id, peer_id)
        digest = clip_digest(pending.clip)

        async with self._conversation_locks[conversation_id]:
            sent_at = max(self.clock(), self._last_sent_at.get(conversation_id, 0))
            envelope = MessageEnvelope(
                message_id=uuid.uuid4().hex,
                conversation_id=conversation_id,
                sender=session.user_id,
                audio_digest=digest,
                duration_ms=pending.clip.duration_ms,
                teaser_id=teaser_id,
                modality=pending.analysis.modality,
                sent_at=sent_at,
            )
            self.store.put_blob(digest, encode_wav(pending.clip))
            self.store.append(envelope)
            self._last_sent_at[conversation_id] = sent_at
            self._messages[envelope.message_id] = envelope

            peer = self.sessions.get(peer_id)
            if peer is not None:
                await self._push_deliver(peer, envelope)
            else:
                self.store.enqueue_delivery(peer_id, envelope)

        del session.pending_uploads[upload_id]
        await session.channel.send_frames(
            [json_frame({"type": T_SEND_OK, "message_id": envelope.message_id})]
        )

    async def _push_deliver(self, session: Session, envelope: MessageEnvelope) -> None:
        await session.channel.send_frames(
            [json_frame({"type": T_DELIVER, "envelope": envelope.as_dict()})]
        )

    async def _handle_fetch_audio(self, session: Session, message: dict) -> None:
        assert session.user_id is not None
        message_id = message.get("message_id")
        if not isinstance(message_id, str):
            raise MalformedFrame("FETCH_AUDIO needs a message_id string")
        envelope = self._messages.get(message_id)
        if envelope is None:
            raise UnknownMessage(message_id)
        if session.user_id not in envelope.parties():
            raise Forbidden(f"{session.user_id} is not a party to this conversation")
        wav_bytes = self.store.get_blob(envelope.audio_digest)
        if wav_bytes is None:
            raise UnknownMessage(f"audio blob missing for {message_id}")
        await session.channel.send_frames(
            [
                json_frame({"type": T_AUDIO, "message_id": message_id}),
                binary_frame(wav_bytes),
            ]
        )

    # --- persistence access ---

    def replay_log(self, conversation_id: str) -> list[MessageEnvelope]:
        return self.store.replay(conversation_id)
