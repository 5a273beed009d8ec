"""The Observer: screenshot to widget set."""

from .annotate import annotate
from .config import PerceptionConfig
from .fusion import filter_graphical, fuse_widgets, merge_text_fragments
from .graphical import extract_graphical_widgets
from .ocr import CommandOcr, FixtureOcr, OcrEngine, TEXT_COLOR
from .pipeline import extract_text_fragments, perceive
from .widgets import PerceptionResult, TextFragment, Widget, WidgetKind, WidgetSet

__all__ = [
    "CommandOcr", "FixtureOcr", "OcrEngine", "PerceptionConfig", "PerceptionResult", "TEXT_COLOR",
    "TextFragment", "Widget", "WidgetKind", "WidgetSet", "annotate", "extract_graphical_widgets",
    "extract_text_fragments", "filter_graphical", "fuse_widgets", "merge_text_fragments", "perceive",
]
