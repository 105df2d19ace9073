/**
 * Client-side audio utilities: encode captured PCM as the canonical
 * 16 kHz mono 16-bit WAV the server expects, with the same linear
 * resampling rule the server documents.
 */

export const CANONICAL_RATE_HZ = 16000;

export function resampleLinear(
  samples: Float32Array,
  sourceRate: number,
  targetRate: number = CANONICAL_RATE_HZ,
): Float32Array {
  if (sourceRate === targetRate) {
    return samples;
  }
  const n = samples.length;
  const m = Math.round((n * targetRate) / sourceRate);
  const out = new Float32Array(m);
  for (let j = 0; j < m; j++) {
    const position = (j * sourceRate) / targetRate;
    const lo = Math.floor(position);
    if (lo >= n - 1) {
      out[j] = samples[n - 1];
    } else {
      const frac = position - lo;
      out[j] = samples[lo] * (1 - frac) + samples[lo + 1] * frac;
    }
  }
  return out;
}

/** Encode mono float samples in [-1, 1] as a 16-bit PCM RIFF/WAVE blob. */
export function encodeWavPcm16(
  samples: Float32Array,
  sampleRate: number = CANONICAL_RATE_HZ,
): Uint8Array {
  const out = new Uint8Array(44 + samples.length * 2);
  const view = new DataView(out.buffer);
  const writeTag = (offset: number, tag: string) => {
    for (let i = 0; i < 4; i++) out[offset + i] = tag.charCodeAt(i);
  };
  writeTag(0, "RIFF");
  view.setUint32(4, 36 + samples.length * 2, true);
  writeTag(8, "WAVE");
  writeTag(12, "fmt ");
  view.setUint32(16, 16, true);
  view.setUint16(20, 1, true); // PCM
  view.setUint16(22, 1, true); // mono
  view.setUint32(24, sampleRate, true);
  view.setUint32(28, sampleRate * 2, true);
  view.setUint16(32, 2, true);
  view.setUint16(34, 16, true);
  writeTag(36, "data");
  view.setUint32(40, samples.length * 2, true);
  for (let i = 0; i < samples.length; i++) {
    const scaled = Math.round(samples[i] * 32768);
    view.setInt16(44 + i * 2, Math.min(Math.max(scaled, -32768), 32767), true);
  }
  return out;
}

/** Minimal decoder for canonical mono 16-bit WAVs (used by tests and playback fallback). */
export function decodeWavPcm16(data: Uint8Array): { sampleRate: number; samples: Float32Array } {
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  const tag = (offset: number) => String.fromCharCode(...data.slice(offset, offset + 4));
  if (tag(0) !== "RIFF" || tag(8) !== "WAVE") {
    throw new Error("not a RIFF/WAVE container");
  }
  let offset = 12;
  let sampleRate = 0;
  let pcm: Uint8Array | null = null;
  while (offset + 8 <= data.length) {
    const chunkId = tag(offset);
    const size = view.getUint32(offset + 4, true);
    const body = offset + 8;
    if (chunkId === "fmt ") {
      if (view.getUint16(body, true) !== 1 || view.getUint16(body + 14, true) !== 16) {
        throw new Error("need 16-bit PCM");
      }
      if (view.getUint16(body + 2, true) !== 1) {
        throw new Error("need mono");
      }
      sampleRate = view.getUint32(body + 4, true);
    } else if (chunkId === "data") {
      pcm = data.slice(body, body + size);
    }
    offset = body + size + (size & 1);
  }
  if (!sampleRate || !pcm) {
    throw new Error("missing fmt or data chunk");
  }
  const samples = new Float32Array(pcm.length / 2);
  const pcmView = new DataView(pcm.buffer, pcm.byteOffset, pcm.byteLength);
  for (let i = 0; i < samples.length; i++) {
    samples[i] = pcmView.getInt16(i * 2, true) / 32768;
  }
  return { sampleRate, samples };
}
