"""Edge-based extraction of graphical widget candidates."""

from __future__ import annotations

import numpy as np
from scipy import ndimage
from skimage.filters import threshold_otsu

from ..raster import BoundingBox, RasterImage
from .config import PerceptionConfig

_SQUARE = np.ones((3, 3), dtype=bool)

# Sobel support and the closing dilation each widen an edge by one pixel.
_SPREAD = 2


def edge_map(img: RasterImage) -> np.ndarray:
    """Closed binary edge map: Sobel magnitude, Otsu threshold, one 3x3 dilation."""
    gray = img.gray()
    gx = ndimage.sobel(gray, axis=1, mode="nearest")
    gy = ndimage.sobel(gray, axis=0, mode="nearest")
    mag = np.hypot(gx, gy)
    if not mag.any():
        return np.zeros(mag.shape, dtype=bool)
    edges = mag > threshold_otsu(mag)
    # 3x3 dilation, done separably.
    return ndimage.maximum_filter1d(ndimage.maximum_filter1d(edges, 3, axis=1), 3, axis=0)


def extract_graphical_widgets(img: RasterImage, cfg: PerceptionConfig | None = None) -> list[BoundingBox]:
    """Bounds of the 8-connected components of the closed edge map."""
    edges = edge_map(img)
    if not edges.any():
        return []
    labels, _ = ndimage.label(edges, structure=_SQUARE)
    boxes = []
    for sl in ndimage.find_objects(labels):
        if sl is None:
            continue
        y0, y1 = _shrink(sl[0].start, sl[0].stop, img.height)
        x0, x1 = _shrink(sl[1].start, sl[1].stop, img.width)
        boxes.append(BoundingBox(x0, y0, x1 - x0, y1 - y0))
    boxes.sort(key=lambda b: (b.y, b.x))
    return boxes


def _shrink(lo, hi, limit):
    a = lo + _SPREAD if lo > 0 else lo
    b = hi - _SPREAD if hi < limit else hi
    if b <= a:
        mid = (lo + hi) // 2
        a, b = mid, min(mid + 1, limit)
    return a, b
