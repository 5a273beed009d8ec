"""Raster images and pixel bounding boxes."""

from __future__ import annotations

import base64
import hashlib
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError


@dataclass(frozen=True, eq=False)
class RasterImage:
    """8-bit RGB image stored as an (height, width, 3) uint8 array.

    The underlying array is made read-only so images can be shared freely
    between the agents and threads.
    """

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"expected HxWx3 pixels, got shape {px.shape}")
        if px.shape[0] <= 0 or px.shape[1] <= 0:
            raise ValueError("image dimensions must be positive")
        px = np.array(px, dtype=np.uint8, copy=True)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @classmethod
    def blank(cls, width: int, height: int, color=(255, 255, 255)) -> RasterImage:
        px = np.empty((height, width, 3), dtype=np.uint8)
        px[:] = color
        return cls(px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def size(self) -> tuple[int, int]:
        return self.width, self.height

    def copy_pixels(self) -> np.ndarray:
        """Writable copy of the pixel buffer."""
        return np.array(self.pixels, copy=True)

    def gray(self) -> np.ndarray:
        px = self.pixels.astype(np.float64)
        return px[..., 0] * 0.299 + px[..., 1] * 0.587 + px[..., 2] * 0.114

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.width}x{self.height}".encode())
        h.update(self.pixels.tobytes())
        return h.hexdigest()

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __hash__(self):
        return hash(self.digest())

    # PNG round-trips

    def to_png(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.pixels, mode="RGB").save(buf, format="PNG")
        return buf.getvalue()

    @classmethod
    def from_png(cls, data: bytes) -> RasterImage:
        try:
            with Image.open(io.BytesIO(data)) as im:
                return cls(np.asarray(im.convert("RGB")))
        except (UnidentifiedImageError, OSError, SyntaxError) as exc:
            raise ValueError(f"not a readable image: {exc}") from exc

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_png())

    @classmethod
    def load(cls, path) -> RasterImage:
        return cls.from_png(Path(path).read_bytes())

    def to_b64(self) -> str:
        return base64.b64encode(self.to_png()).decode("ascii")

    @classmethod
    def from_b64(cls, text: str) -> RasterImage:
        return cls.from_png(base64.b64decode(text))


@dataclass(frozen=True, order=True)
class BoundingBox:
    """Axis-aligned pixel box, top-left origin. ``x + w`` is exclusive."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"box must have positive size: {self}")

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def center(self) -> tuple[float, float]:
        return self.x + self.w / 2.0, self.y + self.h / 2.0

    def center_px(self) -> tuple[int, int]:
        """Integer pixel at the geometric center; always inside the box."""
        return self.x + self.w // 2, self.y + self.h // 2

    def contains_point(self, x: float, y: float) -> bool:
        return self.x <= x < self.x2 and self.y <= y < self.y2

    def contains(self, other: BoundingBox, margin: int = 0) -> bool:
        return (
            other.x >= self.x - margin
            and other.y >= self.y - margin
            and other.x2 <= self.x2 + margin
            and other.y2 <= self.y2 + margin
        )

    def intersection_area(self, other: BoundingBox) -> int:
        iw = min(self.x2, other.x2) - max(self.x, other.x)
        ih = min(self.y2, other.y2) - max(self.y, other.y)
        return iw * ih if iw > 0 and ih > 0 else 0

    def iou(self, other: BoundingBox) -> float:
        inter = self.intersection_area(other)
        if inter == 0:
            return 0.0
        return inter / float(self.area + other.area - inter)

    def union(self, other: BoundingBox) -> BoundingBox:
        x, y = min(self.x, other.x), min(self.y, other.y)
        return BoundingBox(x, y, max(self.x2, other.x2) - x, max(self.y2, other.y2) - y)

    def in_bounds(self, width: int, height: int) -> bool:
        return self.x >= 0 and self.y >= 0 and self.x2 <= width and self.y2 <= height

    def clip(self, width: int, height: int) -> BoundingBox | None:
        """Intersection with the image rectangle, or None when empty."""
        x, y = max(self.x, 0), max(self.y, 0)
        x2, y2 = min(self.x2, width), min(self.y2, height)
        if x2 <= x or y2 <= y:
            return None
        return BoundingBox(x, y, x2 - x, y2 - y)

    def as_list(self) -> list[int]:
        return [self.x, self.y, self.w, self.h]

    @classmethod
    def from_list(cls, seq) -> BoundingBox:
        x, y, w, h = (int(v) for v in seq)
        return cls(x, y, w, h)


def union_all(boxes) -> BoundingBox:
    boxes = list(boxes)
    out = boxes[0]
    for b in boxes[1:]:
        out = out.union(b)
    return out
