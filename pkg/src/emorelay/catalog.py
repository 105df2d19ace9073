"""Teaser catalog: 30 animated bubble designs plus the 30-variant color baseline.

Every entry is addressable by "<mode>/<emotion>/<variant>". Animated entries
carry declarative keyframes the UI renders directly; color entries carry a
fixed per-emotion hue with five brightness levels.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path

from .emotions import EMOTIONS
from .errors import InvariantViolation, SchemaViolation, UnknownTeaser

MODE_ANIMATED = "animated"
MODE_COLOR = "color"
VARIANTS_PER_EMOTION = 5
MAX_LOOP_MS = 4000  # exclusive: loops must repeat in under four seconds

# Fixed emotion-to-hue pairings for the color baseline.
EMOTION_COLORS = {
    "anger": "#D32F2F",
    "happiness": "#F9D342",
    "fear": "#7B1FA2",
    "surprise": "#00838F",
    "sadness": "#1A3E8C",
    "calmness": "#9FD4F5",
}

# Allowed motion classes per emotion for animated designs.
MOTION_FAMILIES = {
    "anger": frozenset({"flame", "clench"}),
    "calmness": frozenset({"float", "water"}),
    "fear": frozenset({"tremble", "fluctuate"}),
    "happiness": frozenset({"bounce", "dance"}),
    "sadness": frozenset({"tear", "melt"}),
    "surprise": frozenset({"pop", "splash"}),
}


@dataclass(frozen=True)
class Transform:
    scale: float
    offset: tuple[float, float]
    rotation: float


@dataclass(frozen=True)
class Keyframe:
    time_fraction: float
    transform: Transform
    decor_opacity: float


@dataclass(frozen=True)
class TeaserSpec:
    id: str
    mode: str
    emotion: str
    variant: int
    # animated-only
    loop_ms: int | None = None
    motion_class: str | None = None
    decor_effects: tuple[str, ...] = ()
    keyframes: tuple[Keyframe, ...] = ()
    # color-only
    base_color: str | None = None
    brightness_level: int | None = None


@dataclass(frozen=True)
class Catalog:
    entries: dict[str, TeaserSpec]
    version: str  # content digest of the source document

    def __len__(self) -> int:
        return len(self.entries)


def _require(doc: dict, field: str, kind: type, context: str):
    if field not in doc:
        raise SchemaViolation(f"{context}: missing field {field!r}")
    value = doc[field]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise SchemaViolation(f"{context}: field {field!r} must be {kind.__name__}")
    return value


def _parse_keyframe(doc: dict, context: str) -> Keyframe:
    if not isinstance(doc, dict):
        raise SchemaViolation(f"{context}: keyframe must be an object")
    t = _require(doc, "time_fraction", float, context)
    transform_doc = _require(doc, "transform", dict, context)
    scale = _require(transform_doc, "scale", float, context)
    rotation = _require(transform_doc, "rotation", float, context)
    offset = _require(transform_doc, "offset", list, context)
    if len(offset) != 2 or not all(isinstance(v, (int, float)) for v in offset):
        raise SchemaViolation(f"{context}: offset must be [x, y]")
    opacity = _require(doc, "decor_opacity", float, context)
    if not 0.0 <= t <= 1.0:
        raise InvariantViolation(f"{context}: time_fraction {t} outside [0, 1]")
    if not 0.0 <= opacity <= 1.0:
        raise InvariantViolation(f"{context}: decor_opacity {opacity} outside [0, 1]")
    return Keyframe(
        time_fraction=float(t),
        transform=Transform(
            scale=float(scale), offset=(float(offset[0]), float(offset[1])), rotation=float(rotation)
        ),
        decor_opacity=float(opacity),
    )


def _parse_spec(doc: dict, mode: str) -> TeaserSpec:
    if not isinstance(doc, dict):
        raise SchemaViolation("catalog entry must be an object")
    spec_id = _require(doc, "id", str, "entry")
    context = f"entry {spec_id!r}"
    emotion = _require(doc, "emotion", str, context)
    variant = _require(doc, "variant", int, context)
    declared_mode = _require(doc, "mode", str, context)

    if emotion not in EMOTIONS:
        raise SchemaViolation(f"{context}: unknown emotion {emotion!r}")
    if declared_mode != mode:
        raise InvariantViolation(f"{context}: mode {declared_mode!r} listed under {mode!r}")
    if not 1 <= variant <= VARIANTS_PER_EMOTION:
        raise InvariantViolation(f"{context}: variant {variant} outside 1..{VARIANTS_PER_EMOTION}")
    if spec_id != f"{mode}/{emotion}/{variant}":
        raise InvariantViolation(f"{context}: id does not match mode/emotion/variant")

    if mode == MODE_ANIMATED:
        loop_ms = _require(doc, "loop_ms", int, context)
        motion_class = _require(doc, "motion_class", str, context)
        decor = _require(doc, "decor_effects", list, context)
        keyframes_doc = _require(doc, "keyframes", list, context)
        if not all(isinstance(tag, str) for tag in decor):
            raise SchemaViolation(f"{context}: decor_effects must be strings")
        keyframes = tuple(_parse_keyframe(k, context) for k in keyframes_doc)

        if loop_ms <= 0 or loop_ms >= MAX_LOOP_MS:
            raise InvariantViolation(f"{context}: loop_ms {loop_ms} must be under {MAX_LOOP_MS}")
        if motion_class not in MOTION_FAMILIES[emotion]:
            raise InvariantViolation(
                f"{context}: motion class {motion_class!r} outside the {emotion} family"
            )
        if len(keyframes) < 2:
            raise InvariantViolation(f"{context}: need at least two keyframes")
        if keyframes[0].time_fraction != 0.0 or keyframes[-1].time_fraction != 1.0:
            raise InvariantViolation(f"{context}: keyframes must start at 0 and end at 1")
        times = [k.time_fraction for k in keyframes]
        if any(a >= b for a, b in zip(times, times[1:])):
            raise InvariantViolation(f"{context}: keyframe times must strictly increase")
        if keyframes[0].transform != keyframes[-1].transform:
            raise InvariantViolation(f"{context}: loop is not seamless (first != last transform)")
        return TeaserSpec(
            id=spec_id,
            mode=mode,
            emotion=emotion,
            variant=variant,
            loop_ms=loop_ms,
            motion_class=motion_class,
            decor_effects=tuple(decor),
            keyframes=keyframes,
        )

    base_color = _require(doc, "base_color", str, context)
    brightness = _require(doc, "brightness_level", int, context)
    if base_color != EMOTION_COLORS[emotion]:
        raise InvariantViolation(
            f"{context}: base_color {base_color} breaks the fixed {emotion} pairing"
        )
    if not 1 <= brightness <= VARIANTS_PER_EMOTION:
        raise InvariantViolation(f"{context}: brightness_level {brightness} outside 1..5")
    return TeaserSpec(
        id=spec_id,
        mode=mode,
        emotion=emotion,
        variant=variant,
        base_color=base_color,
        brightness_level=brightness,
    )


def load_catalog(document: dict) -> Catalog:
    """Validate a catalog document and return the indexed Catalog."""
    if not isinstance(document, dict):
        raise SchemaViolation("catalog document must be an object")
    for key in (MODE_ANIMATED, MODE_COLOR):
        if key not in document or not isinstance(document[key], list):
            raise SchemaViolation(f"catalog document must carry a {key!r} list")

    entries: dict[str, TeaserSpec] = {}
    for mode in (MODE_ANIMATED, MODE_COLOR):
        for doc in document[mode]:
            spec = _parse_spec(doc, mode)
            if spec.id in entries:
                raise InvariantViolation(f"duplicate teaser id {spec.id!r}")
            entries[spec.id] = spec

    for mode in (MODE_ANIMATED, MODE_COLOR):
        mode_specs = [s for s in entries.values() if s.mode == mode]
        expected = VARIANTS_PER_EMOTION * len(EMOTIONS)
        if len(mode_specs) != expected:
            raise InvariantViolation(f"{len(mode_specs)} {mode} entries, need {expected}")
        for emotion in EMOTIONS:
            variants = sorted(
                (s for s in mode_specs if s.emotion == emotion), key=lambda s: s.variant
            )
            if [s.variant for s in variants] != list(range(1, VARIANTS_PER_EMOTION + 1)):
                raise InvariantViolation(f"{mode}/{emotion} variants are not exactly 1..5")
            if mode == MODE_COLOR:
                levels = [s.brightness_level for s in variants]
                ascending = all(a < b for a, b in zip(levels, levels[1:]))
                descending = all(a > b for a, b in zip(levels, levels[1:]))
                if not (ascending or descending):
                    raise InvariantViolation(
                        f"color/{emotion} brightness levels are not monotone: {levels}"
                    )

    version = hashlib.sha256(
        json.dumps(document, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()[:12]
    return Catalog(entries=entries, version=version)


def load_catalog_file(path: Path) -> Catalog:
    with open(path, encoding="utf-8") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"catalog is not valid JSON: {exc}") from None
    return load_catalog(document)


def default_catalog_document() -> dict:
    """The bundled catalog document, as shipped in package data."""
    raw = files("emorelay").joinpath("data/catalog.json").read_text(encoding="utf-8")
    return json.loads(raw)


def default_catalog() -> Catalog:
    return load_catalog(default_catalog_document())


def list_by_emotion(catalog: Catalog, emotion: str, mode: str) -> list[TeaserSpec]:
    """The five variants for one emotion and mode, in variant order."""
    if emotion not in EMOTIONS:
        raise ValueError(f"unknown emotion {emotion!r}")
    if mode not in (MODE_ANIMATED, MODE_COLOR):
        raise ValueError(f"unknown mode {mode!r}")
    specs = [s for s in catalog.entries.values() if s.emotion == emotion and s.mode == mode]
    return sorted(specs, key=lambda s: s.variant)


def resolve(catalog: Catalog, teaser_id: str) -> TeaserSpec:
    spec = catalog.entries.get(teaser_id)
    if spec is None:
        raise UnknownTeaser(teaser_id)
    return spec


# --- color rendering helpers (CIELAB lightness steps) ---

_LIGHTNESS_STEP = 12.0
_LIGHTNESS_MIN = 5.0
_LIGHTNESS_MAX = 98.0


def _srgb_to_linear(c: float) -> float:
    return c / 12.92 if c <= 0.04045 else ((c + 0.055) / 1.055) ** 2.4


def _linear_to_srgb(c: float) -> float:
    c = min(max(c, 0.0), 1.0)
    return 12.92 * c if c <= 0.0031308 else 1.055 * c ** (1 / 2.4) - 0.055


_XYZ_WHITE = (0.95047, 1.0, 1.08883)  # D65


def _f_lab(t: float) -> float:
    return t ** (1 / 3) if t > (6 / 29) ** 3 else t / (3 * (6 / 29) ** 2) + 4 / 29


def _f_lab_inv(t: float) -> float:
    return t**3 if t > 6 / 29 else 3 * (6 / 29) ** 2 * (t - 4 / 29)


def hex_to_lab(color: str) -> tuple[float, float, float]:
    r, g, b = (int(color[i : i + 2], 16) / 255.0 for i in (1, 3, 5))
    rl, gl, bl = _srgb_to_linear(r), _srgb_to_linear(g), _srgb_to_linear(b)
    x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl
    y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl
    z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl
    fx, fy, fz = (_f_lab(v / w) for v, w in zip((x, y, z), _XYZ_WHITE))
    return 116 * fy - 16, 500 * (fx - fy), 200 * (fy - fz)


def lab_to_hex(lab: tuple[float, float, float]) -> str:
    l_star, a_star, b_star = lab
    fy = (l_star + 16) / 116
    fx = fy + a_star / 500
    fz = fy - b_star / 200
    x, y, z = (_f_lab_inv(f) * w for f, w in zip((fx, fy, fz), _XYZ_WHITE))
    rl = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z
    gl = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z
    bl = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z
    channels = (round(_linear_to_srgb(c) * 255) for c in (rl, gl, bl))
    return "#" + "".join(f"{c:02X}" for c in channels)


def brightness_lightness(base_color: str, level: int) -> float:
    """Target CIELAB lightness for one of the five brightness levels."""
    base_l, _, _ = hex_to_lab(base_color)
    shifted = base_l + (level - 3) * _LIGHTNESS_STEP
    return min(max(shifted, _LIGHTNESS_MIN), _LIGHTNESS_MAX)


def color_variant_hex(spec: TeaserSpec) -> str:
    """Rendered hex for a color-mode teaser: the paired hue at its brightness level."""
    if spec.mode != MODE_COLOR:
        raise ValueError("color_variant_hex expects a color-mode spec")
    assert spec.base_color is not None and spec.brightness_level is not None
    _, a_star, b_star = hex_to_lab(spec.base_color)
    return lab_to_hex((brightness_lightness(spec.base_color, spec.brightness_level), a_star, b_star))
