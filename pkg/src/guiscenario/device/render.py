"""Deterministic renderer for simulated app screens.

Every screen is drawn from flat rectangles and the embedded bitmap font, so
the exact same spec and widget values always produce byte-identical pixels.
The renderer also reports each visible widget's ground-truth box, which is the
box perception is expected to recover.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import font
from ..perception.ocr import TEXT_COLOR
from ..raster import BoundingBox, RasterImage

BACKGROUND = (255, 255, 255)
STATUS_BAR = (230, 230, 230)
STATUS_ICON = (90, 90, 90)
STATUS_BAR_H = 48  # at the reference height of 1280 px; scales with the screen
REFERENCE_H = 1280
BUTTON_FILL = (238, 238, 238)
BUTTON_BORDER = (96, 96, 96)
INPUT_BORDER = (150, 150, 150)
ICON_FILL = (66, 133, 244)
BORDER = 2
INPUT_PAD = 16
CAPTION_GAP = 8

VISIBLE_KINDS = ("button", "input", "label", "icon")
WIDGET_KINDS = VISIBLE_KINDS + ("hidden",)


@dataclass(frozen=True)
class TruthWidget:
    id_hint: str
    kind: str
    box: BoundingBox
    text: str | None


@dataclass(frozen=True)
class Rendered:
    image: RasterImage
    truth: tuple[TruthWidget, ...]
    hit_boxes: dict

    def truth_in_reading_order(self) -> list[TruthWidget]:
        idx = list(enumerate(self.truth))
        idx.sort(key=lambda it: (it[1].box.y, it[1].box.x, it[0]))
        return [t for _, t in idx]

    def reading_order_id(self, id_hint: str) -> int:
        for n, t in enumerate(self.truth_in_reading_order(), start=1):
            if t.id_hint == id_hint:
                return n
        raise KeyError(f"widget {id_hint!r} is not visible on this screen")


def _fill(px, box: BoundingBox, color):
    H, W = px.shape[:2]
    px[max(box.y, 0):min(box.y2, H), max(box.x, 0):min(box.x2, W)] = color


def _frame(px, box: BoundingBox, color, t=BORDER):
    _fill(px, BoundingBox(box.x, box.y, box.w, t), color)
    _fill(px, BoundingBox(box.x, box.y2 - t, box.w, t), color)
    _fill(px, BoundingBox(box.x, box.y, t, box.h), color)
    _fill(px, BoundingBox(box.x2 - t, box.y, t, box.h), color)


def status_bar_height(height: int) -> int:
    return max(8, height * STATUS_BAR_H // REFERENCE_H)


def _status_bar(px, width, height):
    sb = status_bar_height(height)
    _fill(px, BoundingBox(0, 0, width, sb), STATUS_BAR)

    def s(v):
        return max(1, v * sb // STATUS_BAR_H)

    x = width - s(120)
    for i, h in enumerate((8, 14, 20, 26)):
        _fill(px, BoundingBox(x + i * s(8), s(38) - s(h), s(5), s(h)), STATUS_ICON)
    _frame(px, BoundingBox(width - s(70), s(16), s(40), s(20)), STATUS_ICON, t=s(2))
    _fill(px, BoundingBox(width - s(66), s(20), s(26), s(12)), STATUS_ICON)
    _fill(px, BoundingBox(width - s(30), s(22), s(4), s(8)), STATUS_ICON)


def _text(px, x, y, text):
    tw, th = font.text_size(text)
    if tw == 0:
        return None
    font.draw_text(px, x, y, text, TEXT_COLOR)
    return BoundingBox(x, y, tw, th)


def _centered_text(px, box: BoundingBox, text):
    tw, th = font.text_size(text)
    if tw == 0:
        return None
    return _text(px, box.x + (box.w - tw) // 2, box.y + (box.h - th) // 2, text)


def label_box(box: BoundingBox | tuple, text: str) -> BoundingBox:
    """Where a label's text lands: top-left aligned, vertically centered in a declared height."""
    x, y, w, h = box if isinstance(box, tuple) else box.as_list()
    tw, th = font.text_size(text)
    ty = y + (h - th) // 2 if h else y
    return BoundingBox(x, ty, max(tw, 1), max(th, 1))


def render(width, height, widgets, values=None, loading=False) -> Rendered:
    """Draw a screen.

    ``widgets`` is a sequence of dicts with ``id``, ``kind``, ``box`` (x, y, w, h)
    and optional ``label``, ``glyph``, ``secret``; ``values`` maps widget id to
    dynamic text (typed input or label content).
    """
    values = values or {}
    px = np.empty((height, width, 3), dtype=np.uint8)
    px[:] = BACKGROUND
    _status_bar(px, width, height)
    truth = []
    hits = {}
    if loading:
        _text(px, (width - font.text_size("Loading...")[0]) // 2, height // 2, "Loading...")
        return Rendered(RasterImage(px), (), {})
    for wd in widgets:
        kind = wd["kind"]
        wid = wd["id"]
        x, y, w, h = wd["box"]
        text = values.get(wid, wd.get("label") or "")
        if kind == "label":
            tb = label_box((x, y, w, h), text) if text else None
            if tb is not None:
                _text(px, tb.x, tb.y, text)
                truth.append(TruthWidget(wid, kind, tb, font.normalize(text)))
                hits[wid] = tb
            elif w and h:
                hits[wid] = BoundingBox(x, y, w, h)
            continue
        box = BoundingBox(x, y, w, h)
        if kind == "hidden":
            hits[wid] = box
            continue
        if kind == "button":
            _fill(px, box, BUTTON_FILL)
            _frame(px, box, BUTTON_BORDER)
            _centered_text(px, box, text)
            truth.append(TruthWidget(wid, kind, box, font.normalize(text) or None))
            hits[wid] = box
        elif kind == "input":
            shown = values.get(wid)
            if shown and wd.get("secret"):
                shown = "*" * len(shown)
            shown = shown if shown else (wd.get("label") or "")
            _fill(px, box, BACKGROUND)
            _frame(px, box, INPUT_BORDER)
            tw, th = font.text_size(shown)
            if tw:
                _text(px, box.x + INPUT_PAD, box.y + (box.h - th) // 2, shown)
            truth.append(TruthWidget(wid, kind, box, font.normalize(shown) or None))
            hits[wid] = box
        elif kind == "icon":
            _fill(px, box, ICON_FILL)
            glyph = wd.get("glyph") or ""
            if glyph:
                _centered_text(px, box, glyph)
            full = box
            caption = wd.get("label") or ""
            if caption:
                cw, ch = font.text_size(caption)
                cb = _text(px, box.x + (box.w - cw) // 2, box.y2 + CAPTION_GAP, caption)
                full = box.union(cb)
            parts = [p for p in (glyph, caption) if p]
            truth.append(TruthWidget(wid, kind, full, " ".join(parts) or None))
            hits[wid] = full
        else:
            raise ValueError(f"unknown widget kind {kind!r}")
    return Rendered(RasterImage(px), tuple(truth), hits)
