/**
 * Relay protocol client over a WebSocket. Works with the browser WebSocket
 * and with the `ws` package in tests; both are used through the same
 * structural interface.
 */

import {
  KIND_BINARY,
  binaryFrame,
  decodeFrame,
  encodeFrame,
  jsonFrame,
  messageOf,
  type ServerMessage,
} from "./protocol.js";

export interface WireSocket {
  binaryType: string;
  send(data: ArrayBufferView | ArrayBuffer): void;
  close(code?: number): void;
  addEventListener(type: "open" | "message" | "close" | "error", listener: (event: any) => void): void;
}

export interface ClientEvents {
  onMessage?: (message: ServerMessage) => void;
  onAudio?: (messageId: string, wavBytes: Uint8Array) => void;
  onClose?: () => void;
}

export class RelayClient {
  private awaitedAudioId: string | null = null;

  constructor(
    private readonly socket: WireSocket,
    private readonly events: ClientEvents,
  ) {
    socket.binaryType = "arraybuffer";
    socket.addEventListener("message", (event) => this.handleMessage(event));
    socket.addEventListener("close", () => this.events.onClose?.());
  }

  private handleMessage(event: { data: ArrayBuffer | Uint8Array }): void {
    const bytes =
      event.data instanceof Uint8Array ? event.data : new Uint8Array(event.data as ArrayBuffer);
    const frame = decodeFrame(bytes);
    if (frame.kind === KIND_BINARY) {
      if (this.awaitedAudioId !== null) {
        const messageId = this.awaitedAudioId;
        this.awaitedAudioId = null;
        this.events.onAudio?.(messageId, frame.payload);
      }
      return;
    }
    const message = messageOf(frame);
    if (message.type === "AUDIO") {
      this.awaitedAudioId = message.message_id;
    }
    this.events.onMessage?.(message);
  }

  private sendMessage(message: object): void {
    this.socket.send(encodeFrame(jsonFrame(message)));
  }

  hello(userId: string): void {
    this.sendMessage({ type: "HELLO", user_id: userId });
  }

  pair(peerId: string): void {
    this.sendMessage({ type: "PAIR", peer_id: peerId });
  }

  upload(wavBytes: Uint8Array, uploadId?: string): void {
    const meta: Record<string, unknown> = { type: "UPLOAD_META" };
    if (uploadId) meta.upload_id = uploadId;
    this.sendMessage(meta);
    this.socket.send(encodeFrame(binaryFrame(wavBytes)));
  }

  sendTeaser(uploadId: string, teaserId: string): void {
    this.sendMessage({ type: "SEND", upload_id: uploadId, teaser_id: teaserId });
  }

  fetchAudio(messageId: string): void {
    this.sendMessage({ type: "FETCH_AUDIO", message_id: messageId });
  }

  bye(): void {
    this.sendMessage({ type: "BYE" });
    this.socket.close();
  }
}

export function connectRelay(
  url: string,
  events: ClientEvents,
  socketFactory: (url: string) => WireSocket = (u) => new WebSocket(u) as unknown as WireSocket,
): Promise<RelayClient> {
  return new Promise((resolve, reject) => {
    const socket = socketFactory(url);
    const client = new RelayClient(socket, events);
    socket.addEventListener("open", () => resolve(client));
    socket.addEventListener("error", (event) => reject(event));
  });
}
