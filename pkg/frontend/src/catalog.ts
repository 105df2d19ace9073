/**
 * Teaser catalog types and lookups, plus the CIELAB brightness math used to
 * render the color-mode variants. The catalog JSON comes verbatim from the
 * server's /catalog endpoint so both sides render from one source of truth.
 */

export interface Transform {
  scale: number;
  offset: [number, number];
  rotation: number;
}

export interface Keyframe {
  time_fraction: number;
  transform: Transform;
  decor_opacity: number;
}

export interface TeaserSpec {
  id: string;
  mode: "animated" | "color";
  emotion: string;
  variant: number;
  loop_ms?: number;
  motion_class?: string;
  decor_effects?: string[];
  keyframes?: Keyframe[];
  base_color?: string;
  brightness_level?: number;
}

export interface CatalogDocument {
  animated: TeaserSpec[];
  color: TeaserSpec[];
}

export class Catalog {
  private byId = new Map<string, TeaserSpec>();

  constructor(document: CatalogDocument) {
    for (const spec of [...document.animated, ...document.color]) {
      this.byId.set(spec.id, spec);
    }
  }

  resolve(teaserId: string): TeaserSpec | undefined {
    return this.byId.get(teaserId);
  }

  variantsFor(emotion: string, mode: "animated" | "color"): TeaserSpec[] {
    const specs = [...this.byId.values()].filter(
      (s) => s.emotion === emotion && s.mode === mode,
    );
    return specs.sort((a, b) => a.variant - b.variant);
  }

  get size(): number {
    return this.byId.size;
  }
}

export async function fetchCatalog(baseUrl: string): Promise<Catalog> {
  const reply = await fetch(`${baseUrl.replace(/\/$/, "")}/catalog`);
  if (!reply.ok) {
    throw new Error(`catalog fetch failed: ${reply.status}`);
  }
  return new Catalog((await reply.json()) as CatalogDocument);
}

// --- color rendering: lightness steps in CIELAB, matching the server ---

const LIGHTNESS_STEP = 12.0;
const LIGHTNESS_MIN = 5.0;
const LIGHTNESS_MAX = 98.0;
const XYZ_WHITE = [0.95047, 1.0, 1.08883]; // D65

function srgbToLinear(c: number): number {
  return c <= 0.04045 ? c / 12.92 : ((c + 0.055) / 1.055) ** 2.4;
}

function linearToSrgb(c: number): number {
  const clamped = Math.min(Math.max(c, 0), 1);
  return clamped <= 0.0031308 ? 12.92 * clamped : 1.055 * clamped ** (1 / 2.4) - 0.055;
}

function fLab(t: number): number {
  return t > (6 / 29) ** 3 ? Math.cbrt(t) : t / (3 * (6 / 29) ** 2) + 4 / 29;
}

function fLabInv(t: number): number {
  return t > 6 / 29 ? t ** 3 : 3 * (6 / 29) ** 2 * (t - 4 / 29);
}

export function hexToLab(color: string): [number, number, number] {
  const r = srgbToLinear(parseInt(color.slice(1, 3), 16) / 255);
  const g = srgbToLinear(parseInt(color.slice(3, 5), 16) / 255);
  const b = srgbToLinear(parseInt(color.slice(5, 7), 16) / 255);
  const x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const y = 0.2126729 * r + 0.7151522 * g + 0.072175 * b;
  const z = 0.0193339 * r + 0.119192 * g + 0.9503041 * b;
  const [fx, fy, fz] = [x, y, z].map((v, i) => fLab(v / XYZ_WHITE[i]));
  return [116 * fy - 16, 500 * (fx - fy), 200 * (fy - fz)];
}

export function labToHex(lab: [number, number, number]): string {
  const [lStar, aStar, bStar] = lab;
  const fy = (lStar + 16) / 116;
  const fx = fy + aStar / 500;
  const fz = fy - bStar / 200;
  const [x, y, z] = [fx, fy, fz].map((f, i) => fLabInv(f) * XYZ_WHITE[i]);
  const r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
  const g = -0.969266 * x + 1.8760108 * y + 0.041556 * z;
  const b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
  const toHex = (c: number) =>
    Math.round(linearToSrgb(c) * 255)
      .toString(16)
      .padStart(2, "0")
      .toUpperCase();
  return `#${toHex(r)}${toHex(g)}${toHex(b)}`;
}

export function brightnessLightness(baseColor: string, level: number): number {
  const [lStar] = hexToLab(baseColor);
  const shifted = lStar + (level - 3) * LIGHTNESS_STEP;
  return Math.min(Math.max(shifted, LIGHTNESS_MIN), LIGHTNESS_MAX);
}

/** Rendered hex for a color-mode teaser at its brightness level. */
export function colorVariantHex(spec: TeaserSpec): string {
  if (spec.mode !== "color" || !spec.base_color || !spec.brightness_level) {
    throw new Error("colorVariantHex expects a color-mode spec");
  }
  const [, aStar, bStar] = hexToLab(spec.base_color);
  return labToHex([brightnessLightness(spec.base_color, spec.brightness_level), aStar, bStar]);
}
