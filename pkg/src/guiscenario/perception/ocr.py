"""OCR engines: exact fixture decoding of the embedded font, and an external command adapter."""

from __future__ import annotations

import logging
import shlex
import subprocess
import tempfile
from pathlib import Path
from typing import Protocol

import numpy as np
from scipy import ndimage

from .. import font
from ..errors import OcrError
from ..raster import BoundingBox, RasterImage
from .widgets import TextFragment

log = logging.getLogger(__name__)

TEXT_COLOR = (0, 0, 0)


class OcrEngine(Protocol):
    def read(self, img: RasterImage) -> list[TextFragment]: ...


class FixtureOcr:
    """Reads text drawn with the embedded bitmap font in an exact color.

    Ink is grouped into line blobs, then each blob is tiled with glyph cells on
    the font's fixed advance. The tiling must explain every ink pixel, so a
    decode either succeeds exactly or the blob is skipped.
    """

    def __init__(self, color=TEXT_COLOR, scale: int = font.DEFAULT_SCALE):
        self.color = tuple(int(c) for c in color)
        self.scale = scale
        self.undecoded = 0

    def read(self, img: RasterImage) -> list[TextFragment]:
        s = self.scale
        mask = np.all(img.pixels == np.array(self.color, dtype=np.uint8), axis=2)
        if not mask.any():
            return []
        # Bridges the widest in-glyph and in-word gaps (5s); text lines must sit
        # more than 6s apart to stay separate.
        reach = 6 * s + 1
        grown = ndimage.maximum_filter1d(ndimage.maximum_filter1d(mask, reach, axis=1), reach, axis=0)
        labels, _ = ndimage.label(grown, structure=np.ones((3, 3)))
        frags: list[TextFragment] = []
        self.undecoded = 0
        for idx, sl in enumerate(ndimage.find_objects(labels), start=1):
            if sl is None:
                continue
            blob = mask[sl] & (labels[sl] == idx)
            ys, xs = np.nonzero(blob)
            if ys.size == 0:
                continue
            oy, ox = sl[0].start, sl[1].start
            words = self._decode_blob(blob[ys.min():ys.max() + 1, xs.min():xs.max() + 1])
            if words is None:
                self.undecoded += 1
                log.debug("undecodable ink blob at (%d, %d)", ox + xs.min(), oy + ys.min())
                continue
            for text, wx, wy, ww, wh in words:
                box = BoundingBox(int(ox + xs.min() + wx), int(oy + ys.min() + wy), int(ww), int(wh))
                frags.append(TextFragment(text, box.clip(img.width, img.height) or box))
        frags.sort(key=lambda f: (f.box.y, f.box.x))
        return frags

    def _decode_blob(self, ink: np.ndarray):
        """Decode a tight ink crop; returns word tuples relative to the crop origin."""
        s = self.scale
        gh = font.GLYPH_H * s
        pad = 8 * s
        h, w = ink.shape
        if h > gh:
            return None
        canvas = np.zeros((h + 2 * pad, w + 2 * pad), dtype=bool)
        canvas[pad:pad + h, pad:pad + w] = ink
        right = pad + w
        for dy in range(font.GLYPH_H):
            top = pad - dy * s
            if top + gh < pad + h:
                continue
            band = canvas[top:top + gh]
            if band.sum() != ink.sum():
                continue
            for dx in range(font.GLYPH_W):
                left = pad - dx * s
                glyphs = self._tile(band, left, right)
                if glyphs is not None:
                    return self._words(glyphs, pad, top)
        return None

    def _tile(self, band: np.ndarray, start: int, right: int):
        s = self.scale
        gw = font.GLYPH_W * s
        adv, sp = font.advance(s), font.space_advance(s)
        width = band.shape[1]

        def glyph_at(x):
            if x < 0 or x + gw > width:
                return None
            cell = band[:, x:x + gw]
            pat = cell[::s, ::s]
            if not pat.any() or not np.array_equal(np.kron(pat, np.ones((s, s), dtype=bool)), cell):
                return None
            return font.PATTERNS.get(np.packbits(pat).tobytes())

        def empty(x0, x1):
            return not band[:, max(x0, 0):max(x1, 0)].any()

        def solve(x, after_glyph):
            if x >= right or empty(x, width):
                return []
            ch = glyph_at(x)
            if ch is not None and empty(x + gw, x + adv):
                rest = solve(x + adv, True)
                if rest is not None:
                    return [(ch, x, False)] + rest
            if after_glyph and empty(x, x + sp):
                ch = glyph_at(x + sp)
                if ch is not None and empty(x + sp + gw, x + sp + adv):
                    rest = solve(x + sp + adv, True)
                    if rest is not None:
                        return [(ch, x + sp, True)] + rest
            return None

        return solve(start, False)

    def _words(self, glyphs, pad, top):
        s = self.scale
        gw, gh = font.GLYPH_W * s, font.GLYPH_H * s
        words = []
        cur = None
        for ch, x, space_before in glyphs:
            if cur is None or space_before:
                if cur is not None:
                    words.append(cur)
                cur = [ch, x, x + gw]
            else:
                cur[0] += ch
                cur[2] = x + gw
        if cur is not None:
            words.append(cur)
        return [(text, x0 - pad, top - pad, x1 - x0, gh) for text, x0, x1 in words]


class CommandOcr:
    """Runs an external OCR command and parses its box/text output.

    ``command`` is an argv list (or shell-style string) where ``{image}`` is
    replaced by a temporary PNG path. Output is either Tesseract TSV (header
    row starting with ``level``) or one ``x y w h text`` record per line.
    """

    def __init__(self, command, timeout: float = 60.0):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout

    def read(self, img: RasterImage) -> list[TextFragment]:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "screen.png"
            img.save(path)
            argv = [a.replace("{image}", str(path)) for a in self.command]
            try:
                proc = subprocess.run(argv, capture_output=True, text=True, timeout=self.timeout)
            except (OSError, subprocess.TimeoutExpired) as exc:
                raise OcrError(f"OCR command failed: {exc}") from exc
        if proc.returncode != 0:
            raise OcrError(f"OCR command exited {proc.returncode}: {proc.stderr.strip()[:200]}")
        return parse_ocr_output(proc.stdout, img.width, img.height)


def parse_ocr_output(text: str, width: int, height: int) -> list[TextFragment]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    frags = []
    if lines and lines[0].lower().startswith("level"):
        header = lines[0].split("\t")
        col = {name: i for i, name in enumerate(header)}
        try:
            for ln in lines[1:]:
                parts = ln.split("\t")
                if len(parts) < len(header):
                    continue
                word = parts[col["text"]].strip()
                if not word or float(parts[col["conf"]]) < 0:
                    continue
                box = BoundingBox(int(parts[col["left"]]), int(parts[col["top"]]),
                                  int(parts[col["width"]]), int(parts[col["height"]]))
                clipped = box.clip(width, height)
                if clipped is not None:
                    conf = min(max(float(parts[col["conf"]]) / 100.0, 0.0), 1.0)
                    frags.append(TextFragment(word, clipped, conf))
        except (KeyError, ValueError) as exc:
            raise OcrError(f"malformed TSV OCR output: {exc}") from exc
        return frags
    for ln in lines:
        parts = ln.split(None, 4)
        if len(parts) < 5:
            raise OcrError(f"malformed OCR record: {ln!r}")
        try:
            box = BoundingBox(*(int(float(p)) for p in parts[:4]))
        except ValueError as exc:
            raise OcrError(f"malformed OCR record: {ln!r}") from exc
        clipped = box.clip(width, height)
        if clipped is not None and parts[4].strip():
            frags.append(TextFragment(parts[4].strip(), clipped))
    return frags
