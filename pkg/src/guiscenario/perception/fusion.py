"""Text merging, graphical filtering and graphical/textual fusion."""

from __future__ import annotations

from statistics import median

from ..raster import BoundingBox, RasterImage, union_all
from .config import PerceptionConfig
from .widgets import Widget, WidgetKind, WidgetSet, reading_order


def _can_merge(a: BoundingBox, b: BoundingBox, med_h: float, cfg: PerceptionConfig) -> bool:
    gap = max(b.x - a.x2, a.x - b.x2)
    offset = abs(a.center[1] - b.center[1])
    return gap <= cfg.text_gap_factor * med_h and offset <= cfg.text_align_factor * med_h


def _join(a: Widget, b: Widget) -> Widget:
    left, right = (a, b) if (a.box.x, a.box.y) <= (b.box.x, b.box.y) else (b, a)
    return Widget(
        id=0,
        box=a.box.union(b.box),
        kind=WidgetKind.TEXTUAL,
        text=f"{left.text} {right.text}",
        confidence=min(a.confidence, b.confidence),
    )


def merge_text_fragments(frags, cfg: PerceptionConfig | None = None) -> list[Widget]:
    """Merge OCR word fragments into phrases until no pair satisfies the merge predicate.

    The median height is re-evaluated over the current set after every merge,
    which makes the result a fixed point of the operation itself.
    """
    cfg = cfg or PerceptionConfig()
    # Accepts raw fragments or textual widgets (for re-application).
    items = reading_order([Widget(0, f.box, WidgetKind.TEXTUAL, f.text, f.confidence) for f in frags])
    merged = True
    while merged and len(items) > 1:
        merged = False
        med_h = median(w.box.h for w in items)
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                if _can_merge(items[i].box, items[j].box, med_h, cfg):
                    joined = _join(items[i], items[j])
                    items = reading_order(items[:i] + [joined] + items[i + 1:j] + items[j + 1:])
                    merged = True
                    break
            if merged:
                break
    return [w.with_id(k) for k, w in enumerate(items, start=1)]


def filter_graphical(candidates, text_widgets, img: RasterImage, cfg: PerceptionConfig | None = None) -> list[BoundingBox]:
    """Drop text duplicates, status-bar icons, and boxes that are too large or too small."""
    cfg = cfg or PerceptionConfig()
    img_area = img.width * img.height
    band = cfg.statusbar_frac * img.height
    text_boxes = [t.box for t in text_widgets]
    kept = []
    for box in candidates:
        if box.area > cfg.max_area_frac * img_area:
            continue
        if box.area < cfg.min_area_px:
            continue
        if box.y2 <= band:
            continue
        if any(box.iou(t) > cfg.text_iou or t.contains(box, cfg.text_contain_margin) for t in text_boxes):
            continue
        kept.append(box)
    return kept


def _relation(g: BoundingBox, t: BoundingBox) -> str | None:
    """Where the label sits relative to the graphical box, if it can belong to it."""
    gcx, gcy = g.center
    h_overlap = t.x < g.x2 and t.x2 > g.x
    v_overlap = t.y < g.y2 and t.y2 > g.y
    if g.contains(t):
        return "inside"
    if h_overlap and t.center[1] > gcy and t.y >= g.y2 - t.h // 2:
        return "below"
    if v_overlap and t.x >= g.x2 - t.w // 4:
        return "right"
    if v_overlap and t.x2 <= g.x + t.w // 4:
        return "left"
    return None


def _dist(a: BoundingBox, b: BoundingBox) -> float:
    (ax, ay), (bx, by) = a.center, b.center
    return ((ax - bx) ** 2 + (ay - by) ** 2) ** 0.5


def fuse_widgets(graphical, textual, cfg: PerceptionConfig | None = None) -> WidgetSet:
    """Attach each label to the closest qualifying graphical box; everything else passes through."""
    cfg = cfg or PerceptionConfig()
    graphical = list(graphical)
    textual = list(textual)
    owners: dict[int, list[Widget]] = {}
    loose = []
    for t in textual:
        best = None
        for gi, g in enumerate(graphical):
            rel = _relation(g, t.box)
            if rel is None:
                continue
            # A label drawn inside a box belongs to it regardless of distance.
            d = 0.0 if rel == "inside" else _dist(g, t.box)
            if d > cfg.fuse_dist_factor * max(g.h, t.box.h):
                continue
            key = (0 if rel == "inside" else 1, d, gi)
            if best is None or key < best:
                best = key
        if best is None:
            loose.append(t)
        else:
            owners.setdefault(best[2], []).append(t)
    out = []
    for gi, g in enumerate(graphical):
        labels = owners.get(gi)
        if not labels:
            out.append(Widget(0, g, WidgetKind.GRAPHICAL, None, 1.0))
            continue
        labels = reading_order(labels)
        out.append(Widget(
            0,
            union_all([g] + [t.box for t in labels]),
            WidgetKind.FUSED,
            " ".join(t.text for t in labels),
            min(t.confidence for t in labels),
        ))
    out.extend(Widget(0, t.box, WidgetKind.TEXTUAL, t.text, t.confidence) for t in loose)
    return WidgetSet(out)
