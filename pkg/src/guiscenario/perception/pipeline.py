from __future__ import annotations

from ..errors import OcrError
from ..raster import RasterImage
from .annotate import annotate
from .config import PerceptionConfig
from .fusion import filter_graphical, fuse_widgets, merge_text_fragments
from .graphical import extract_graphical_widgets
from .widgets import PerceptionResult, TextFragment


def extract_text_fragments(img: RasterImage, ocr) -> list[TextFragment]:
    try:
        frags = ocr.read(img)
    except OcrError:
        raise
    except Exception as exc:
        raise OcrError(f"{type(ocr).__name__} failed: {exc}") from exc
    return [f for f in frags if f.text]


def perceive(img: RasterImage, ocr, cfg: PerceptionConfig | None = None) -> PerceptionResult:
    cfg = cfg or PerceptionConfig()
    graphical = extract_graphical_widgets(img, cfg)
    textual = merge_text_fragments(extract_text_fragments(img, ocr), cfg)
    kept = filter_graphical(graphical, textual, img, cfg)
    widgets = fuse_widgets(kept, textual, cfg)
    return PerceptionResult(widgets=widgets, annotated=annotate(img, widgets), source=img)
