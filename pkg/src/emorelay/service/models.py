"""Pydantic request/response models for the REST surface."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    ok: bool
    service: str
    version: str


class FusionWeightsModel(BaseModel):
    w_speech: float
    w_text: float


class DiagnosticsResponse(BaseModel):
    service_version: str
    catalog_version: str
    catalog_entries: int
    emotions: list[str]
    fusion_weights: FusionWeightsModel
    acoustic_model_loaded: bool
    transcription: str  # "mock" or "none"
    upload_ttl_s: float
    duration_cap_s: float
    live_sessions: int


class ClassifyResponse(BaseModel):
    modality: str
    transcript: str | None
    p_speech: list[float] = Field(min_length=6, max_length=6)
    p_text: list[float] | None = None
    fused: list[float] = Field(min_length=6, max_length=6)
    order: list[str] = Field(min_length=6, max_length=6)
    top_two: list[str] = Field(min_length=2, max_length=2)
    frame_count: int
    mfcc: list[float] = Field(min_length=40, max_length=40)


class EnvelopeModel(BaseModel):
    message_id: str
    conversation_id: str
    sender: str
    audio_digest: str
    duration_ms: int
    teaser_id: str
    modality: str
    sent_at: int


class ConversationLogResponse(BaseModel):
    conversation_id: str
    messages: list[EnvelopeModel]
