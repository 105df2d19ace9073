/**
 * Conversation state driven purely by server frames plus a few local events.
 * The reducer is pure so the ordering invariants are testable without a DOM:
 * messages stay ordered by sent_at (stable for equal stamps, so DELIVER
 * arrival order is never violated), the recommendation icon order is the
 * server's verbatim, and pending state clears on SEND_OK or expiry.
 */

import type { Envelope, ServerMessage } from "./protocol.js";

export interface UiMessage {
  envelope: Envelope;
  played: boolean;
  direction: "in" | "out";
}

export interface PendingRecommendation {
  uploadId: string;
  order: string[]; // the server's RECOMMENDATION order, verbatim
  probs: number[];
  modality: string;
}

export interface OutgoingDraft {
  uploadId: string;
  teaserId: string;
  durationMs: number;
}

export interface UiConversationState {
  selfId: string | null;
  peerId: string | null;
  conversationId: string | null;
  emotions: string[];
  catalogVersion: string | null;
  connection: "connecting" | "ready" | "closed";
  messages: UiMessage[];
  pending: PendingRecommendation | null;
  draft: OutgoingDraft | null; // set when the user confirms a teaser, until SEND_OK
  lastError: { code: string; detail: string } | null;
}

export function initialState(): UiConversationState {
  return {
    selfId: null,
    peerId: null,
    conversationId: null,
    emotions: [],
    catalogVersion: null,
    connection: "connecting",
    messages: [],
    pending: null,
    draft: null,
    lastError: null,
  };
}

function insertBySentAt(messages: UiMessage[], incoming: UiMessage): UiMessage[] {
  // stable: equal sent_at keeps arrival order, so DELIVER order is preserved
  const index = messages.findIndex((m) => m.envelope.sent_at > incoming.envelope.sent_at);
  if (index === -1) {
    return [...messages, incoming];
  }
  return [...messages.slice(0, index), incoming, ...messages.slice(index)];
}

export function reduce(state: UiConversationState, message: ServerMessage): UiConversationState {
  switch (message.type) {
    case "HELLO_OK":
      return {
        ...state,
        connection: "ready",
        emotions: message.emotions,
        catalogVersion: message.catalog_version,
        lastError: null,
      };
    case "PAIRED": {
      const parties = message.conversation_id.split(":");
      const peer = parties.find((p) => p !== state.selfId) ?? null;
      return { ...state, conversationId: message.conversation_id, peerId: peer };
    }
    case "RECOMMENDATION":
      return {
        ...state,
        pending: {
          uploadId: message.upload_id,
          order: message.order,
          probs: message.probs,
          modality: message.modality,
        },
        lastError: null,
      };
    case "SEND_OK": {
      if (!state.draft || !state.pending || !state.selfId || !state.conversationId) {
        return { ...state, pending: null, draft: null };
      }
      const echo: UiMessage = {
        direction: "out",
        played: true,
        envelope: {
          message_id: message.message_id,
          conversation_id: state.conversationId,
          sender: state.selfId,
          audio_digest: "",
          duration_ms: state.draft.durationMs,
          teaser_id: state.draft.teaserId,
          modality: state.pending.modality,
          sent_at: Date.now(),
        },
      };
      return {
        ...state,
        messages: insertBySentAt(state.messages, echo),
        pending: null,
        draft: null,
      };
    }
    case "DELIVER":
      return {
        ...state,
        messages: insertBySentAt(state.messages, {
          envelope: message.envelope,
          played: false,
          direction: "in",
        }),
      };
    case "AUDIO":
      return state; // the binary frame that follows is handled by the client layer
    case "ERROR": {
      const next: UiConversationState = {
        ...state,
        lastError: { code: message.code, detail: message.detail },
      };
      if (message.code === "UPLOAD_REJECTED") {
        next.pending = null;
        next.draft = null;
      }
      if (message.code === "UPLOAD_EXPIRED") {
        next.pending = null;
        next.draft = null;
      }
      return next;
    }
  }
}

export function helloSent(state: UiConversationState, selfId: string): UiConversationState {
  return { ...state, selfId };
}

export function teaserConfirmed(
  state: UiConversationState,
  teaserId: string,
  durationMs: number,
): UiConversationState {
  if (!state.pending) {
    return state;
  }
  return { ...state, draft: { uploadId: state.pending.uploadId, teaserId, durationMs } };
}

export function pendingExpired(state: UiConversationState): UiConversationState {
  return { ...state, pending: null, draft: null };
}

export function connectionLost(state: UiConversationState): UiConversationState {
  return { ...state, connection: "closed", pending: null, draft: null };
}

export function markPlayed(state: UiConversationState, messageId: string): UiConversationState {
  return {
    ...state,
    messages: state.messages.map((m) =>
      m.envelope.message_id === messageId ? { ...m, played: true } : m,
    ),
  };
}
