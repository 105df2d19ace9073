"""FastAPI application: the framed relay protocol over WebSocket plus the
REST surface (catalog, diagnostics, offline classification, conversation
logs)."""

from __future__ import annotations

import asyncio
import contextlib
import json
from dataclasses import replace
from importlib.resources import files

from fastapi import FastAPI, Form, Response, UploadFile, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .. import __version__
from ..audio import parse_wav
from ..catalog import Catalog, load_catalog
from ..classify import (
    MockTranscriptionClient,
    StaticTranscriptionClient,
    default_lexicon,
    load_acoustic_model,
    load_lexicon,
)
from ..config import ServiceConfig
from ..emotions import EMOTIONS
from ..errors import EmorelayError, MalformedFrame, UnknownConversation
from ..features import FrameSpec
from ..fusion import FusionWeights
from ..pipeline import AnalysisResult, EmotionPipeline
from ..protocol import Frame, decode_frame, encode_frame, error_message, json_frame
from ..relay import RelayServer
from ..store import ConversationStore
from .models import (
    ClassifyResponse,
    ConversationLogResponse,
    DiagnosticsResponse,
    EnvelopeModel,
    FusionWeightsModel,
    HealthResponse,
)

SERVICE_NAME = "emorelay"


def _load_catalog_bytes(config: ServiceConfig) -> bytes:
    if config.catalog_path is not None:
        return config.catalog_path.read_bytes()
    return files("emorelay").joinpath("data/catalog.json").read_bytes()


def _load_pipeline(config: ServiceConfig) -> EmotionPipeline:
    if config.lexicon_path is not None or config.taxonomy_path is not None:
        data = files("emorelay").joinpath("data")
        lexicon_doc = json.loads(
            config.lexicon_path.read_text(encoding="utf-8")
            if config.lexicon_path
            else data.joinpath("lexicon.json").read_text(encoding="utf-8")
        )
        taxonomy_doc = json.loads(
            config.taxonomy_path.read_text(encoding="utf-8")
            if config.taxonomy_path
            else data.joinpath("taxonomy.json").read_text(encoding="utf-8")
        )
        lexicon = load_lexicon(lexicon_doc, taxonomy_doc)
    else:
        lexicon = default_lexicon()

    model = None
    if config.model_path is not None:
        model = load_acoustic_model(config.model_path.read_bytes())

    transcription = None
    if config.transcripts_path is not None:
        transcription = MockTranscriptionClient.from_file(config.transcripts_path)

    return EmotionPipeline(
        lexicon=lexicon,
        model=model,
        transcription=transcription,
        weights=FusionWeights(w_speech=config.w_speech, w_text=config.w_text),
        frame_spec=FrameSpec(),
        transcribe_timeout_s=config.transcribe_timeout_s,
    )


def analysis_to_response(analysis: AnalysisResult) -> ClassifyResponse:
    recommendation = analysis.recommendation
    return ClassifyResponse(
        modality=analysis.modality,
        transcript=analysis.transcript,
        p_speech=list(analysis.p_speech.probs),
        p_text=list(analysis.p_text.probs) if analysis.p_text is not None else None,
        fused=list(recommendation.fused.probs),
        order=[EMOTIONS[i] for i in recommendation.order],
        top_two=[EMOTIONS[i] for i in recommendation.top_two],
        frame_count=analysis.feature_summary["frame_count"],
        mfcc=analysis.feature_summary["coefficients"],
    )


class WebSocketChannel:
    """Session channel over one WebSocket; a lock keeps multi-frame replies atomic."""

    def __init__(self, websocket: WebSocket):
        self._websocket = websocket
        self._lock = asyncio.Lock()

    async def send_frames(self, frames: list[Frame]) -> None:
        async with self._lock:
            for frame in frames:
                await self._websocket.send_bytes(encode_frame(frame))


def create_app(config: ServiceConfig) -> FastAPI:
    catalog_bytes = _load_catalog_bytes(config)
    catalog: Catalog = load_catalog(json.loads(catalog_bytes))
    pipeline = _load_pipeline(config)
    store = ConversationStore(config.storage_dir)
    relay = RelayServer(
        catalog=catalog,
        pipeline=pipeline,
        store=store,
        upload_ttl_s=config.upload_ttl_s,
        duration_cap_s=config.duration_cap_s,
    )

    app = FastAPI(title=SERVICE_NAME, version=__version__)
    # the watch client is served statically from elsewhere; let it call us
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.config = config
    app.state.relay = relay
    app.state.catalog_bytes = catalog_bytes

    @app.get("/healthz", response_model=HealthResponse)
    def healthz() -> HealthResponse:
        return HealthResponse(ok=True, service=SERVICE_NAME, version=__version__)

    @app.get("/catalog")
    def get_catalog() -> Response:
        # served verbatim so client and server render from one source of truth
        return Response(content=catalog_bytes, media_type="application/json")

    @app.get("/diagnostics", response_model=DiagnosticsResponse)
    def diagnostics() -> DiagnosticsResponse:
        return DiagnosticsResponse(
            service_version=__version__,
            catalog_version=catalog.version,
            catalog_entries=len(catalog),
            emotions=list(EMOTIONS),
            fusion_weights=FusionWeightsModel(
                w_speech=pipeline.weights.w_speech, w_text=pipeline.weights.w_text
            ),
            acoustic_model_loaded=pipeline.model is not None,
            transcription="mock" if pipeline.transcription is not None else "none",
            upload_ttl_s=config.upload_ttl_s,
            duration_cap_s=config.duration_cap_s,
            live_sessions=len(relay.sessions),
        )

    @app.post("/classify", response_model=ClassifyResponse)
    async def classify(file: UploadFile, transcript: str | None = Form(default=None)):
        data = await file.read()
        request_pipeline = pipeline
        if transcript is not None:
            request_pipeline = replace(pipeline, transcription=StaticTranscriptionClient(transcript))
        try:
            clip = parse_wav(data)
            analysis = await asyncio.to_thread(request_pipeline.analyze, clip)
        except EmorelayError as exc:
            return JSONResponse(status_code=422, content={"code": exc.code, "detail": str(exc)})
        return analysis_to_response(analysis)

    @app.get("/conversations/{conversation_id}/messages", response_model=ConversationLogResponse)
    def conversation_log(conversation_id: str):
        try:
            envelopes = relay.replay_log(conversation_id)
        except UnknownConversation:
            return JSONResponse(
                status_code=404,
                content={"code": "UNKNOWN_CONVERSATION", "detail": conversation_id},
            )
        return ConversationLogResponse(
            conversation_id=conversation_id,
            messages=[EnvelopeModel(**e.as_dict()) for e in envelopes],
        )

    @app.websocket("/ws")
    async def relay_socket(websocket: WebSocket) -> None:
        await websocket.accept()
        channel = WebSocketChannel(websocket)
        session = relay.new_session(channel)
        try:
            keep = True
            while keep:
                message = await websocket.receive()
                if message["type"] == "websocket.disconnect":
                    break
                data = message.get("bytes")
                if data is None:
                    await channel.send_frames(
                        [json_frame(error_message("MALFORMED_FRAME", "binary frames only"))]
                    )
                    break
                try:
                    frame = decode_frame(data)
                except MalformedFrame as exc:
                    await channel.send_frames([json_frame(error_message(exc.code, str(exc)))])
                    break
                keep = await relay.handle_frame(session, frame)
        except WebSocketDisconnect:
            pass
        finally:
            await relay.disconnect(session)
            with contextlib.suppress(Exception):
                await websocket.close()

    return app
