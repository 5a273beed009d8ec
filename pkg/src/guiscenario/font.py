"""Embedded 5x7 bitmap font used by the sim renderer and the fixture OCR.

Glyphs are column-encoded: five bytes per character, bit ``i`` of a byte is row
``i`` (top row is bit 0). Characters are laid out on a fixed advance of
``6 * scale`` pixels; a space advances ``2 * scale`` extra pixels so the
inter-word gap is ``3 * scale``.
"""

from __future__ import annotations

import numpy as np

GLYPH_W = 5
GLYPH_H = 7
DEFAULT_SCALE = 2

_COLUMNS = {
    "!": (0x00, 0x00, 0x5F, 0x00, 0x00),
    '"': (0x00, 0x07, 0x00, 0x07, 0x00),
    "#": (0x14, 0x7F, 0x14, 0x7F, 0x14),
    "$": (0x24, 0x2A, 0x7F, 0x2A, 0x12),
    "%": (0x23, 0x13, 0x08, 0x64, 0x62),
    "&": (0x36, 0x49, 0x55, 0x22, 0x50),
    "'": (0x00, 0x00, 0x07, 0x00, 0x00),
    "(": (0x00, 0x1C, 0x22, 0x41, 0x00),
    ")": (0x00, 0x41, 0x22, 0x1C, 0x00),
    "*": (0x08, 0x2A, 0x1C, 0x2A, 0x08),
    "+": (0x08, 0x08, 0x3E, 0x08, 0x08),
    ",": (0x00, 0x50, 0x30, 0x00, 0x00),
    "-": (0x00, 0x08, 0x08, 0x08, 0x00),
    ".": (0x00, 0x60, 0x60, 0x00, 0x00),
    "/": (0x20, 0x10, 0x08, 0x04, 0x02),
    "0": (0x3E, 0x51, 0x49, 0x45, 0x3E),
    "1": (0x00, 0x42, 0x7F, 0x40, 0x00),
    "2": (0x42, 0x61, 0x51, 0x49, 0x46),
    "3": (0x21, 0x41, 0x45, 0x4B, 0x31),
    "4": (0x18, 0x14, 0x12, 0x7F, 0x10),
    "5": (0x27, 0x45, 0x45, 0x45, 0x39),
    "6": (0x3C, 0x4A, 0x49, 0x49, 0x30),
    "7": (0x01, 0x71, 0x09, 0x05, 0x03),
    "8": (0x36, 0x49, 0x49, 0x49, 0x36),
    "9": (0x06, 0x49, 0x49, 0x29, 0x1E),
    ":": (0x00, 0x36, 0x36, 0x00, 0x00),
    ";": (0x00, 0x56, 0x36, 0x00, 0x00),
    "<": (0x08, 0x14, 0x22, 0x41, 0x00),
    "=": (0x14, 0x14, 0x14, 0x14, 0x14),
    ">": (0x00, 0x41, 0x22, 0x14, 0x08),
    "?": (0x02, 0x01, 0x51, 0x09, 0x06),
    "@": (0x32, 0x49, 0x79, 0x41, 0x3E),
    "A": (0x7E, 0x11, 0x11, 0x11, 0x7E),
    "B": (0x7F, 0x49, 0x49, 0x49, 0x36),
    "C": (0x3E, 0x41, 0x41, 0x41, 0x22),
    "D": (0x7F, 0x41, 0x41, 0x22, 0x1C),
    "E": (0x7F, 0x49, 0x49, 0x49, 0x41),
    "F": (0x7F, 0x09, 0x09, 0x01, 0x01),
    "G": (0x3E, 0x41, 0x41, 0x51, 0x32),
    "H": (0x7F, 0x08, 0x08, 0x08, 0x7F),
    "I": (0x00, 0x41, 0x7F, 0x41, 0x00),
    "J": (0x20, 0x40, 0x41, 0x3F, 0x01),
    "K": (0x7F, 0x08, 0x14, 0x22, 0x41),
    "L": (0x7F, 0x40, 0x40, 0x40, 0x40),
    "M": (0x7F, 0x02, 0x04, 0x02, 0x7F),
    "N": (0x7F, 0x04, 0x08, 0x10, 0x7F),
    "O": (0x3E, 0x41, 0x41, 0x41, 0x3E),
    "P": (0x7F, 0x09, 0x09, 0x09, 0x06),
    "Q": (0x3E, 0x41, 0x51, 0x21, 0x5E),
    "R": (0x7F, 0x09, 0x19, 0x29, 0x46),
    "S": (0x46, 0x49, 0x49, 0x49, 0x31),
    "T": (0x01, 0x01, 0x7F, 0x01, 0x01),
    "U": (0x3F, 0x40, 0x40, 0x40, 0x3F),
    "V": (0x1F, 0x20, 0x40, 0x20, 0x1F),
    "W": (0x7F, 0x20, 0x18, 0x20, 0x7F),
    "X": (0x63, 0x14, 0x08, 0x14, 0x63),
    "Y": (0x03, 0x04, 0x78, 0x04, 0x03),
    "Z": (0x61, 0x51, 0x49, 0x45, 0x43),
    "[": (0x00, 0x00, 0x7F, 0x41, 0x41),
    "]": (0x41, 0x41, 0x7F, 0x00, 0x00),
    "^": (0x04, 0x02, 0x01, 0x02, 0x04),
    "_": (0x40, 0x40, 0x40, 0x40, 0x40),
    "a": (0x20, 0x54, 0x54, 0x54, 0x78),
    "b": (0x7F, 0x48, 0x44, 0x44, 0x38),
    "c": (0x38, 0x44, 0x44, 0x44, 0x20),
    "d": (0x38, 0x44, 0x44, 0x48, 0x7F),
    "e": (0x38, 0x54, 0x54, 0x54, 0x18),
    "f": (0x08, 0x7E, 0x09, 0x01, 0x02),
    "g": (0x08, 0x14, 0x54, 0x54, 0x3C),
    "h": (0x7F, 0x08, 0x04, 0x04, 0x78),
    "i": (0x00, 0x44, 0x7D, 0x40, 0x00),
    "j": (0x20, 0x40, 0x44, 0x3D, 0x00),
    "k": (0x00, 0x7F, 0x10, 0x28, 0x44),
    "l": (0x00, 0x41, 0x7F, 0x40, 0x00),
    "m": (0x7C, 0x04, 0x18, 0x04, 0x78),
    "n": (0x7C, 0x08, 0x04, 0x04, 0x78),
    "o": (0x38, 0x44, 0x44, 0x44, 0x38),
    "p": (0x7C, 0x14, 0x14, 0x14, 0x08),
    "q": (0x08, 0x14, 0x14, 0x18, 0x7C),
    "r": (0x7C, 0x08, 0x04, 0x04, 0x08),
    "s": (0x48, 0x54, 0x54, 0x54, 0x20),
    "t": (0x04, 0x3F, 0x44, 0x40, 0x20),
    "u": (0x3C, 0x40, 0x40, 0x20, 0x7C),
    "v": (0x1C, 0x20, 0x40, 0x20, 0x1C),
    "w": (0x3C, 0x40, 0x30, 0x40, 0x3C),
    "x": (0x44, 0x28, 0x10, 0x28, 0x44),
    "y": (0x0C, 0x50, 0x50, 0x50, 0x3C),
    "z": (0x44, 0x64, 0x54, 0x4C, 0x44),
    "|": (0x00, 0x00, 0x7F, 0x00, 0x00),
}


def _decode(cols) -> np.ndarray:
    g = np.zeros((GLYPH_H, GLYPH_W), dtype=bool)
    for c, byte in enumerate(cols):
        for r in range(GLYPH_H):
            g[r, c] = bool(byte >> r & 1)
    return g


GLYPHS: dict[str, np.ndarray] = {ch: _decode(cols) for ch, cols in _COLUMNS.items()}
CHARSET = frozenset(GLYPHS) | {" "}

# Lookup used by the fixture OCR: packed 7x5 bit pattern -> character.
PATTERNS: dict[bytes, str] = {np.packbits(g).tobytes(): ch for ch, g in GLYPHS.items()}


def advance(scale: int = DEFAULT_SCALE) -> int:
    return (GLYPH_W + 1) * scale


def space_advance(scale: int = DEFAULT_SCALE) -> int:
    return 2 * scale


def normalize(text: str) -> str:
    """Collapse whitespace runs; the layout only knows single spaces."""
    return " ".join(text.split())


def layout(text: str, scale: int = DEFAULT_SCALE) -> list[tuple[str, int]]:
    """Glyph x-offsets for ``text`` relative to the text origin."""
    out = []
    x = 0
    for ch in normalize(text):
        if ch == " ":
            x += space_advance(scale)
            continue
        if ch not in GLYPHS:
            raise ValueError(f"character {ch!r} is not in the embedded font")
        out.append((ch, x))
        x += advance(scale)
    return out


def text_size(text: str, scale: int = DEFAULT_SCALE) -> tuple[int, int]:
    placed = layout(text, scale)
    if not placed:
        return 0, 0
    return placed[-1][1] + GLYPH_W * scale, GLYPH_H * scale


def glyph_mask(ch: str, scale: int = DEFAULT_SCALE) -> np.ndarray:
    g = GLYPHS[ch]
    return np.kron(g, np.ones((scale, scale), dtype=bool)).astype(bool)


def draw_text(pixels: np.ndarray, x: int, y: int, text: str, color, scale: int = DEFAULT_SCALE):
    """Render ``text`` into a writable HxWx3 buffer; glyphs are clipped at the border."""
    h, w = pixels.shape[:2]
    for ch, dx in layout(text, scale):
        m = glyph_mask(ch, scale)
        x0, y0 = x + dx, y
        xa, ya = max(x0, 0), max(y0, 0)
        xb, yb = min(x0 + m.shape[1], w), min(y0 + m.shape[0], h)
        if xa >= xb or ya >= yb:
            continue
        sub = m[ya - y0:yb - y0, xa - x0:xb - x0]
        region = pixels[ya:yb, xa:xb]
        region[sub] = color
