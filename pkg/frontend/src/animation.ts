/**
 * Keyframe playback math for animated teasers. A spec's keyframes cover one
 * loop over time fractions 0..1; sampling wraps at loop_ms so every bubble
 * repeats seamlessly for as long as it stays on screen.
 */

import type { Keyframe, TeaserSpec, Transform } from "./catalog.js";

export interface AnimationSample {
  transform: Transform;
  decorOpacity: number;
}

export function loopPeriodMs(spec: TeaserSpec): number {
  if (spec.mode !== "animated" || !spec.loop_ms) {
    throw new Error(`not an animated spec: ${spec.id}`);
  }
  return spec.loop_ms;
}

function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * t;
}

function interpolate(a: Keyframe, b: Keyframe, t: number): AnimationSample {
  return {
    transform: {
      scale: lerp(a.transform.scale, b.transform.scale, t),
      offset: [
        lerp(a.transform.offset[0], b.transform.offset[0], t),
        lerp(a.transform.offset[1], b.transform.offset[1], t),
      ],
      rotation: lerp(a.transform.rotation, b.transform.rotation, t),
    },
    decorOpacity: lerp(a.decor_opacity, b.decor_opacity, t),
  };
}

/** Sample the teaser's transform at an absolute time since it appeared. */
export function sampleAt(spec: TeaserSpec, elapsedMs: number): AnimationSample {
  const period = loopPeriodMs(spec);
  const keyframes = spec.keyframes ?? [];
  if (keyframes.length < 2) {
    throw new Error(`spec ${spec.id} has no keyframes`);
  }
  const phase = (((elapsedMs % period) + period) % period) / period;
  for (let i = 1; i < keyframes.length; i++) {
    const prev = keyframes[i - 1];
    const next = keyframes[i];
    if (phase <= next.time_fraction) {
      const span = next.time_fraction - prev.time_fraction;
      const t = span > 0 ? (phase - prev.time_fraction) / span : 0;
      return interpolate(prev, next, t);
    }
  }
  return interpolate(keyframes[keyframes.length - 1], keyframes[keyframes.length - 1], 0);
}

/** CSS transform string for a sample, sized to the bubble's pixel diameter. */
export function cssTransform(sample: AnimationSample, bubblePx: number): string {
  const [dx, dy] = sample.transform.offset;
  return (
    `translate(${(dx * bubblePx).toFixed(2)}px, ${(dy * bubblePx).toFixed(2)}px) ` +
    `scale(${sample.transform.scale.toFixed(4)}) ` +
    `rotate(${sample.transform.rotation.toFixed(2)}deg)`
  );
}
