import { describe, expect, it } from "vitest";

import type { Envelope } from "../src/protocol.js";
import {
  connectionLost,
  helloSent,
  initialState,
  markPlayed,
  pendingExpired,
  reduce,
  teaserConfirmed,
} from "../src/state.js";

function envelope(id: string, sentAt: number, teaser = "animated/anger/1"): Envelope {
  return {
    message_id: id,
    conversation_id: "alice:bob",
    sender: "bob",
    audio_digest: `digest-${id}`,
    duration_ms: 1200,
    teaser_id: teaser,
    modality: "fused",
    sent_at: sentAt,
  };
}

function readyState() {
  let state = helloSent(initialState(), "alice");
  state = reduce(state, {
    type: "HELLO_OK",
    catalog_version: "abc",
    emotions: ["happiness", "sadness", "surprise", "calmness", "fear", "anger"],
  });
  return reduce(state, { type: "PAIRED", conversation_id: "alice:bob" });
}

describe("conversation state", () => {
  it("hello_ok pins the canonical emotion order and catalog version", () => {
    const state = readyState();
    expect(state.connection).toBe("ready");
    expect(state.emotions[3]).toBe("calmness");
    expect(state.catalogVersion).toBe("abc");
    expect(state.peerId).toBe("bob");
  });

  it("keeps the recommendation order verbatim", () => {
    const order = ["surprise", "calmness", "happiness", "sadness", "fear", "anger"];
    const state = reduce(readyState(), {
      type: "RECOMMENDATION",
      upload_id: "u1",
      order,
      probs: [0.05, 0.1, 0.4, 0.25, 0.15, 0.05],
      modality: "fused",
    });
    expect(state.pending?.order).toEqual(order);
    expect(state.pending?.uploadId).toBe("u1");
  });

  it("send_ok clears pending and echoes an outgoing message", () => {
    let state = reduce(readyState(), {
      type: "RECOMMENDATION",
      upload_id: "u1",
      order: ["happiness", "sadness", "surprise", "calmness", "fear", "anger"],
      probs: [0.3, 0.2, 0.15, 0.15, 0.1, 0.1],
      modality: "fused",
    });
    state = teaserConfirmed(state, "animated/happiness/2", 1500);
    state = reduce(state, { type: "SEND_OK", message_id: "m1" });
    expect(state.pending).toBeNull();
    expect(state.draft).toBeNull();
    expect(state.messages).toHaveLength(1);
    expect(state.messages[0].direction).toBe("out");
    expect(state.messages[0].envelope.teaser_id).toBe("animated/happiness/2");
    expect(state.messages[0].envelope.message_id).toBe("m1");
  });

  it("delivers stay ordered by sent_at with arrival order on ties", () => {
    let state = readyState();
    state = reduce(state, { type: "DELIVER", envelope: envelope("m1", 100) });
    state = reduce(state, { type: "DELIVER", envelope: envelope("m2", 100) });
    state = reduce(state, { type: "DELIVER", envelope: envelope("m3", 100) });
    state = reduce(state, { type: "DELIVER", envelope: envelope("m4", 250) });
    expect(state.messages.map((m) => m.envelope.message_id)).toEqual(["m1", "m2", "m3", "m4"]);
  });

  it("never drops deliveries", () => {
    let state = readyState();
    for (let i = 0; i < 100; i++) {
      state = reduce(state, { type: "DELIVER", envelope: envelope(`m${i}`, 1000 + i) });
    }
    expect(state.messages).toHaveLength(100);
    const ids = state.messages.map((m) => m.envelope.message_id);
    expect(ids).toEqual([...Array(100).keys()].map((i) => `m${i}`));
  });

  it("upload rejection clears pending state and records the error", () => {
    let state = reduce(readyState(), {
      type: "RECOMMENDATION",
      upload_id: "u1",
      order: ["happiness", "sadness", "surprise", "calmness", "fear", "anger"],
      probs: [1, 0, 0, 0, 0, 0],
      modality: "fused",
    });
    state = reduce(state, { type: "ERROR", code: "UPLOAD_REJECTED", detail: "TOO_SHORT" });
    expect(state.pending).toBeNull();
    expect(state.lastError?.code).toBe("UPLOAD_REJECTED");
  });

  it("pending expiry and connection loss both clear pending", () => {
    const withPending = reduce(readyState(), {
      type: "RECOMMENDATION",
      upload_id: "u1",
      order: ["happiness", "sadness", "surprise", "calmness", "fear", "anger"],
      probs: [1, 0, 0, 0, 0, 0],
      modality: "speech-only",
    });
    expect(pendingExpired(withPending).pending).toBeNull();
    const lost = connectionLost(withPending);
    expect(lost.pending).toBeNull();
    expect(lost.connection).toBe("closed");
  });

  it("markPlayed flips exactly one message", () => {
    let state = readyState();
    state = reduce(state, { type: "DELIVER", envelope: envelope("m1", 1) });
    state = reduce(state, { type: "DELIVER", envelope: envelope("m2", 2) });
    state = markPlayed(state, "m2");
    expect(state.messages.map((m) => m.played)).toEqual([false, true]);
  });
});
