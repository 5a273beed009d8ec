from __future__ import annotations

from .. import font
from ..raster import RasterImage

OUTLINE = (255, 0, 0)
TAG_TEXT = (255, 255, 255)
LINE = 2
TAG_PAD = 2


def tag_region(box, img_w, img_h, widget_id):
    """Pixel rectangle (x0, y0, x1, y1) of the id tag drawn at a box's top-left corner."""
    tw, th = font.text_size(str(widget_id))
    x0, y0 = box.x, box.y
    return x0, y0, min(x0 + tw + 2 * TAG_PAD, img_w), min(y0 + th + 2 * TAG_PAD, img_h)


def annotate(img: RasterImage, widgets) -> RasterImage:
    """Outline each widget box and stamp its id in a filled tag at the top-left corner."""
    widgets = list(widgets)
    if not widgets:
        return RasterImage(img.pixels)
    px = img.copy_pixels()
    H, W = px.shape[:2]
    for w in widgets:
        b = w.box
        x0, y0, x1, y1 = b.x, b.y, min(b.x2, W), min(b.y2, H)
        t = min(LINE, b.w, b.h)
        px[y0:y0 + t, x0:x1] = OUTLINE
        px[y1 - t:y1, x0:x1] = OUTLINE
        px[y0:y1, x0:x0 + t] = OUTLINE
        px[y0:y1, x1 - t:x1] = OUTLINE
    for w in widgets:
        tx0, ty0, tx1, ty1 = tag_region(w.box, W, H, w.id)
        px[ty0:ty1, tx0:tx1] = OUTLINE
        font.draw_text(px, tx0 + TAG_PAD, ty0 + TAG_PAD, str(w.id), TAG_TEXT)
    return RasterImage(px)
