/**
 * Frame codec for the relay protocol, mirroring the server byte-for-byte:
 * 4-byte big-endian length (covering the rest of the frame), 1 kind byte
 * (0 = JSON control message, 1 = binary payload), then the payload.
 */

export const KIND_JSON = 0;
export const KIND_BINARY = 1;

export const MAX_FRAME_BYTES = 16 * 1024 * 1024;

export interface Frame {
  kind: number;
  payload: Uint8Array;
}

export interface Envelope {
  message_id: string;
  conversation_id: string;
  sender: string;
  audio_digest: string;
  duration_ms: number;
  teaser_id: string;
  modality: string;
  sent_at: number;
}

export type ServerMessage =
  | { type: "HELLO_OK"; catalog_version: string; emotions: string[] }
  | { type: "PAIRED"; conversation_id: string }
  | {
      type: "RECOMMENDATION";
      upload_id: string;
      order: string[];
      probs: number[];
      modality: string;
    }
  | { type: "SEND_OK"; message_id: string }
  | { type: "DELIVER"; envelope: Envelope }
  | { type: "AUDIO"; message_id: string }
  | { type: "ERROR"; code: string; detail: string };

const encoder = new TextEncoder();
const decoder = new TextDecoder();

export function encodeFrame(frame: Frame): Uint8Array {
  const length = 1 + frame.payload.length;
  if (length > MAX_FRAME_BYTES) {
    throw new Error(`frame of ${length} bytes exceeds the cap`);
  }
  const out = new Uint8Array(4 + length);
  new DataView(out.buffer).setUint32(0, length, false);
  out[4] = frame.kind;
  out.set(frame.payload, 5);
  return out;
}

export function decodeFrame(data: Uint8Array): Frame {
  if (data.length < 5) {
    throw new Error("frame shorter than its fixed header");
  }
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  const length = view.getUint32(0, false);
  if (length > MAX_FRAME_BYTES) {
    throw new Error(`declared length ${length} exceeds the cap`);
  }
  if (data.length !== 4 + length) {
    throw new Error(`container is ${data.length} bytes, header promises ${4 + length}`);
  }
  const kind = data[4];
  if (kind !== KIND_JSON && kind !== KIND_BINARY) {
    throw new Error(`unknown frame kind ${kind}`);
  }
  return { kind, payload: data.slice(5) };
}

export function jsonFrame(message: object): Frame {
  return { kind: KIND_JSON, payload: encoder.encode(JSON.stringify(message)) };
}

export function binaryFrame(payload: Uint8Array): Frame {
  return { kind: KIND_BINARY, payload };
}

export function messageOf(frame: Frame): ServerMessage {
  if (frame.kind !== KIND_JSON) {
    throw new Error("expected a JSON frame");
  }
  const parsed = JSON.parse(decoder.decode(frame.payload));
  if (typeof parsed !== "object" || parsed === null || typeof parsed.type !== "string") {
    throw new Error("control message must be an object with a string 'type'");
  }
  return parsed as ServerMessage;
}

/** Incremental decoder for frames arriving over a raw byte stream. */
export class FrameReader {
  private buffer = new Uint8Array(0);

  feed(data: Uint8Array): Frame[] {
    const merged = new Uint8Array(this.buffer.length + data.length);
    merged.set(this.buffer, 0);
    merged.set(data, this.buffer.length);
    this.buffer = merged;

    const frames: Frame[] = [];
    for (;;) {
      if (this.buffer.length < 4) break;
      const view = new DataView(this.buffer.buffer, this.buffer.byteOffset, 4);
      const length = view.getUint32(0, false);
      if (length < 1) throw new Error("frame without a kind byte");
      if (length > MAX_FRAME_BYTES) throw new Error(`declared length ${length} exceeds the cap`);
      if (this.buffer.length < 4 + length) break;
      frames.push(decodeFrame(this.buffer.slice(0, 4 + length)));
      this.buffer = this.buffer.slice(4 + length);
    }
    return frames;
  }
}
