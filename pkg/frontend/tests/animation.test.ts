import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { cssTransform, loopPeriodMs, sampleAt } from "../src/animation.js";
import { Catalog, type CatalogDocument, type TeaserSpec } from "../src/catalog.js";

const here = dirname(fileURLToPath(import.meta.url));

export function bundledCatalog(): Catalog {
  const raw = readFileSync(join(here, "../../src/emorelay/data/catalog.json"), "utf-8");
  return new Catalog(JSON.parse(raw) as CatalogDocument);
}

const catalog = bundledCatalog();

function animatedSpecs(): TeaserSpec[] {
  const specs: TeaserSpec[] = [];
  for (const emotion of ["happiness", "sadness", "surprise", "calmness", "fear", "anger"]) {
    specs.push(...catalog.variantsFor(emotion, "animated"));
  }
  return specs;
}

describe("teaser animation playback", () => {
  it("loop period equals the catalog loop_ms for all 30 designs", () => {
    const specs = animatedSpecs();
    expect(specs).toHaveLength(30);
    for (const spec of specs) {
      expect(loopPeriodMs(spec)).toBe(spec.loop_ms);
      expect(loopPeriodMs(spec)).toBeLessThan(4000);
    }
  });

  it("sampling at zero and at the full period hits the first keyframe", () => {
    for (const spec of animatedSpecs()) {
      const first = spec.keyframes![0];
      for (const elapsed of [0, spec.loop_ms!, 2 * spec.loop_ms!]) {
        const sample = sampleAt(spec, elapsed);
        expect(sample.transform.scale).toBeCloseTo(first.transform.scale, 10);
        expect(sample.transform.offset[0]).toBeCloseTo(first.transform.offset[0], 10);
        expect(sample.transform.offset[1]).toBeCloseTo(first.transform.offset[1], 10);
        expect(sample.transform.rotation).toBeCloseTo(first.transform.rotation, 10);
      }
    }
  });

  it("sampling exactly at a keyframe reproduces it", () => {
    for (const spec of animatedSpecs()) {
      for (const keyframe of spec.keyframes!.slice(0, -1)) {
        const sample = sampleAt(spec, keyframe.time_fraction * spec.loop_ms!);
        expect(sample.transform.scale).toBeCloseTo(keyframe.transform.scale, 8);
        expect(sample.decorOpacity).toBeCloseTo(keyframe.decor_opacity, 8);
      }
    }
  });

  it("interpolates linearly between keyframes", () => {
    const spec = catalog.resolve("animated/calmness/1")!;
    const [a, b] = spec.keyframes!.slice(0, 2);
    const midMs = ((a.time_fraction + b.time_fraction) / 2) * spec.loop_ms!;
    const sample = sampleAt(spec, midMs);
    expect(sample.transform.offset[1]).toBeCloseTo(
      (a.transform.offset[1] + b.transform.offset[1]) / 2,
      10,
    );
  });

  it("a full cycle returns to the starting transform (seamless loop)", () => {
    for (const spec of animatedSpecs()) {
      const start = sampleAt(spec, 0);
      const end = sampleAt(spec, spec.loop_ms! - 1e-9);
      expect(end.transform.scale).toBeCloseTo(start.transform.scale, 5);
      expect(end.transform.offset[0]).toBeCloseTo(start.transform.offset[0], 5);
      expect(end.transform.offset[1]).toBeCloseTo(start.transform.offset[1], 5);
    }
  });

  it("renders a css transform string", () => {
    const spec = catalog.resolve("animated/happiness/1")!;
    const css = cssTransform(sampleAt(spec, 0), 64);
    expect(css).toMatch(/translate\(.*px, .*px\) scale\(.*\) rotate\(.*deg\)/);
  });
});
