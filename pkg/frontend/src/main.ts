/**
 * Watch-simulator app: record or pick a voice message, review the
 * recommended emotion ordering, preview and select a teaser, send, and see
 * incoming messages as looping teaser bubbles that play audio on tap.
 */

import { cssTransform, sampleAt } from "./animation.js";
import { encodeWavPcm16, resampleLinear } from "./audio.js";
import { Catalog, colorVariantHex, fetchCatalog, type TeaserSpec } from "./catalog.js";
import { RelayClient, connectRelay } from "./client.js";
import {
  connectionLost,
  helloSent,
  initialState,
  markPlayed,
  reduce,
  teaserConfirmed,
  type UiConversationState,
} from "./state.js";

const EMOTION_ICONS: Record<string, string> = {
  happiness: "\u{1F60A}",
  sadness: "\u{1F622}",
  surprise: "\u{1F62E}",
  calmness: "\u{1F60C}",
  fear: "\u{1F628}",
  anger: "\u{1F620}",
};

const DECOR_ICONS: Record<string, string> = {
  bounce: "✨",
  dance: "\u{1F3B5}",
  tear: "\u{1F4A7}",
  melt: "\u{1F4A7}",
  pop: "❗",
  splash: "\u{1F4A6}",
  float: "☁️",
  water: "\u{1F30A}",
  tremble: "〰️",
  fluctuate: "〰️",
  flame: "\u{1F525}",
  clench: "\u{1F4A2}",
};

interface App {
  state: UiConversationState;
  client: RelayClient | null;
  catalog: Catalog | null;
  serverBase: string;
  mode: "animated" | "color";
  pickedEmotion: string | null;
  pickedTeaserId: string | null;
  lastRecordingMs: number;
  audioCache: Map<string, Uint8Array>; // audio bytes by digest
  animationStarts: Map<string, number>; // loop phase anchor per element key
}

const app: App = {
  state: initialState(),
  client: null,
  catalog: null,
  serverBase: "",
  mode: "animated",
  pickedEmotion: null,
  pickedTeaserId: null,
  lastRecordingMs: 0,
  audioCache: new Map(),
  animationStarts: new Map(),
};

const $ = (id: string) => document.getElementById(id) as HTMLElement;

function setStatus(text: string): void {
  $("status").textContent = text;
  const connectStatus = document.getElementById("connect-status");
  if (connectStatus) connectStatus.textContent = text;
}

async function connect(): Promise<void> {
  const server = ($("server") as HTMLInputElement).value.trim() || "http://127.0.0.1:8765";
  const user = ($("user") as HTMLInputElement).value.trim();
  const peer = ($("peer") as HTMLInputElement).value.trim();
  if (!user || !peer) {
    setStatus("enter both user ids");
    return;
  }
  app.serverBase = server;
  try {
    app.catalog = await fetchCatalog(server);
  } catch (err) {
    setStatus(`catalog fetch failed: ${err}`);
    return;
  }
  const wsUrl = server.replace(/^http/, "ws").replace(/\/$/, "") + "/ws";
  try {
    app.client = await connectRelay(wsUrl, {
      onMessage: (message) => {
        app.state = reduce(app.state, message);
        if (message.type === "HELLO_OK") {
          app.client!.pair(peer);
        }
        if (message.type === "ERROR" && message.code === "PEER_UNAVAILABLE") {
          setStatus(`waiting for ${peer}... retrying pair`);
          setTimeout(() => app.client?.pair(peer), 1500);
        }
        render();
      },
      onAudio: (messageId, wavBytes) => {
        const entry = app.state.messages.find((m) => m.envelope.message_id === messageId);
        if (entry) {
          app.audioCache.set(entry.envelope.audio_digest, wavBytes);
          playBytes(wavBytes);
          app.state = markPlayed(app.state, messageId);
          render();
        }
      },
      onClose: () => {
        app.state = connectionLost(app.state);
        setStatus("connection lost");
        render();
      },
    });
  } catch {
    setStatus("connection failed");
    return;
  }
  app.state = helloSent(app.state, user);
  app.client.hello(user);
  $("connect-screen").hidden = true;
  $("watch-screen").hidden = false;
}

function playBytes(wavBytes: Uint8Array): void {
  const blob = new Blob([wavBytes.buffer.slice(0) as ArrayBuffer], { type: "audio/wav" });
  void new Audio(URL.createObjectURL(blob)).play();
}

// --- recording (press and hold), with a file-upload fallback ---

let recording: {
  context: AudioContext;
  processor: ScriptProcessorNode;
  source: MediaStreamAudioSourceNode;
  stream: MediaStream;
  chunks: Float32Array[];
} | null = null;

async function startRecording(): Promise<void> {
  try {
    const stream = await navigator.mediaDevices.getUserMedia({ audio: true });
    const context = new AudioContext();
    const source = context.createMediaStreamSource(stream);
    const processor = context.createScriptProcessor(4096, 1, 1);
    const chunks: Float32Array[] = [];
    processor.onaudioprocess = (event) => {
      chunks.push(new Float32Array(event.inputBuffer.getChannelData(0)));
    };
    source.connect(processor);
    processor.connect(context.destination);
    recording = { context, processor, source, stream, chunks };
    $("record").classList.add("recording");
    setStatus("recording... release to send");
  } catch (err) {
    setStatus(`microphone unavailable (${err}); use the file picker`);
  }
}

function stopRecording(): void {
  if (!recording) return;
  const { context, processor, source, stream, chunks } = recording;
  recording = null;
  $("record").classList.remove("recording");
  processor.disconnect();
  source.disconnect();
  stream.getTracks().forEach((t) => t.stop());
  const total = chunks.reduce((n, c) => n + c.length, 0);
  const merged = new Float32Array(total);
  let offset = 0;
  for (const chunk of chunks) {
    merged.set(chunk, offset);
    offset += chunk.length;
  }
  const canonical = resampleLinear(merged, context.sampleRate);
  void context.close();
  uploadSamples(canonical);
}

function uploadSamples(samples: Float32Array): void {
  if (!app.client) return;
  app.lastRecordingMs = Math.round((1000 * samples.length) / 16000);
  app.client.upload(encodeWavPcm16(samples));
  setStatus("classifying...");
}

function uploadFile(file: File): void {
  void file.arrayBuffer().then((buffer) => {
    if (!app.client) return;
    const bytes = new Uint8Array(buffer);
    app.lastRecordingMs = 0; // filled from the server envelope on echo
    app.client.upload(bytes);
    setStatus("classifying...");
  });
}

// --- rendering ---

function teaserBubble(spec: TeaserSpec | undefined, key: string, sizePx: number): HTMLElement {
  const bubble = document.createElement("div");
  bubble.className = "bubble";
  bubble.style.width = `${sizePx}px`;
  bubble.style.height = `${sizePx}px`;
  if (!spec) {
    bubble.classList.add("neutral");
    bubble.title = "unknown teaser";
    const badge = document.createElement("span");
    badge.className = "badge";
    badge.textContent = "?";
    bubble.appendChild(badge);
    return bubble;
  }
  if (spec.mode === "color") {
    bubble.style.background = colorVariantHex(spec);
    return bubble;
  }
  bubble.dataset.teaserId = spec.id;
  bubble.dataset.animKey = key;
  const body = document.createElement("div");
  body.className = "bubble-body";
  const decor = document.createElement("span");
  decor.className = "decor";
  decor.textContent = DECOR_ICONS[spec.motion_class ?? ""] ?? "✦";
  body.appendChild(decor);
  bubble.appendChild(body);
  if (!app.animationStarts.has(key)) {
    app.animationStarts.set(key, performance.now());
  }
  return bubble;
}

function render(): void {
  const state = app.state;
  $("peer-label").textContent = state.peerId
    ? `${state.selfId} ↔ ${state.peerId}`
    : (state.selfId ?? "");
  $("reconnect").hidden = state.connection !== "closed";
  if (state.lastError) {
    setStatus(`${state.lastError.code}: ${state.lastError.detail}`);
  }

  renderMessages();
  renderPicker();
}

function renderMessages(): void {
  const list = $("messages");
  list.textContent = "";
  for (const message of app.state.messages) {
    const row = document.createElement("div");
    row.className = `row ${message.direction}`;
    const spec = app.catalog?.resolve(message.envelope.teaser_id);
    const bubble = teaserBubble(spec, `msg:${message.envelope.message_id}`, 64);
    bubble.classList.add(message.played ? "played" : "unplayed");
    bubble.addEventListener("click", () => onBubbleTap(message.envelope.message_id));
    row.appendChild(bubble);
    const meta = document.createElement("span");
    meta.className = "meta";
    meta.textContent = `${(message.envelope.duration_ms / 1000).toFixed(1)}s`;
    row.appendChild(meta);
    list.appendChild(row);
  }
  list.scrollTop = list.scrollHeight;
}

function onBubbleTap(messageId: string): void {
  const entry = app.state.messages.find((m) => m.envelope.message_id === messageId);
  if (!entry || !app.client) return;
  const cached = app.audioCache.get(entry.envelope.audio_digest);
  if (cached) {
    playBytes(cached);
    app.state = markPlayed(app.state, messageId);
    render();
  } else {
    app.client.fetchAudio(messageId);
  }
}

function renderPicker(): void {
  const picker = $("picker");
  const pending = app.state.pending;
  picker.hidden = !pending;
  if (!pending || !app.catalog) return;

  const icons = $("emotion-icons");
  icons.textContent = "";
  // icon order is the server's RECOMMENDATION order, verbatim
  for (const emotion of pending.order) {
    const button = document.createElement("button");
    button.className = "emotion" + (app.pickedEmotion === emotion ? " picked" : "");
    button.textContent = EMOTION_ICONS[emotion] ?? emotion;
    button.title = emotion;
    button.addEventListener("click", () => {
      app.pickedEmotion = emotion;
      app.pickedTeaserId = null;
      render();
    });
    icons.appendChild(button);
  }
  if (!app.pickedEmotion) {
    app.pickedEmotion = pending.order[0];
  }

  ($("mode-toggle") as HTMLButtonElement).textContent =
    app.mode === "animated" ? "mode: animated" : "mode: color";

  const variants = $("variants");
  variants.textContent = "";
  for (const spec of app.catalog.variantsFor(app.pickedEmotion, app.mode)) {
    const holder = document.createElement("div");
    holder.className = "variant" + (app.pickedTeaserId === spec.id ? " picked" : "");
    holder.appendChild(teaserBubble(spec, `preview:${spec.id}`, 44));
    holder.addEventListener("click", () => {
      app.pickedTeaserId = spec.id;
      render();
    });
    variants.appendChild(holder);
  }

  ($("confirm") as HTMLButtonElement).disabled = !app.pickedTeaserId;
}

function confirmSend(): void {
  const pending = app.state.pending;
  if (!pending || !app.pickedTeaserId || !app.client) return;
  app.state = teaserConfirmed(app.state, app.pickedTeaserId, app.lastRecordingMs);
  app.client.sendTeaser(pending.uploadId, app.pickedTeaserId);
  app.pickedTeaserId = null;
  app.pickedEmotion = null;
  setStatus("sent");
}

function animationTick(): void {
  const now = performance.now();
  document.querySelectorAll<HTMLElement>(".bubble[data-anim-key]").forEach((bubble) => {
    const spec = app.catalog?.resolve(bubble.dataset.teaserId ?? "");
    if (!spec || spec.mode !== "animated") return;
    const startedAt = app.animationStarts.get(bubble.dataset.animKey!) ?? now;
    const sample = sampleAt(spec, now - startedAt);
    const body = bubble.querySelector<HTMLElement>(".bubble-body");
    if (body) {
      body.style.transform = cssTransform(sample, bubble.clientWidth);
      const decor = body.querySelector<HTMLElement>(".decor");
      if (decor) decor.style.opacity = sample.decorOpacity.toFixed(3);
    }
  });
  requestAnimationFrame(animationTick);
}

export function start(): void {
  $("connect").addEventListener("click", () => void connect());
  $("reconnect").addEventListener("click", () => {
    $("connect-screen").hidden = false;
    $("watch-screen").hidden = true;
    app.state = initialState();
  });
  const record = $("record");
  record.addEventListener("pointerdown", () => void startRecording());
  record.addEventListener("pointerup", stopRecording);
  record.addEventListener("pointerleave", stopRecording);
  $("file").addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement;
    if (input.files?.[0]) uploadFile(input.files[0]);
    input.value = "";
  });
  $("mode-toggle").addEventListener("click", () => {
    app.mode = app.mode === "animated" ? "color" : "animated";
    app.pickedTeaserId = null;
    render();
  });
  $("confirm").addEventListener("click", confirmSend);
  requestAnimationFrame(animationTick);
}

if (typeof document !== "undefined" && document.getElementById("watch")) {
  start();
}
