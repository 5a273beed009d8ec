"""Backend contract and clocks."""

from __future__ import annotations

import time
from typing import Protocol

from ..raster import BoundingBox, RasterImage


class Clock(Protocol):
    def now(self) -> float: ...

    def sleep(self, seconds: float) -> None: ...


class SystemClock:
    def now(self) -> float:
        return time.time()

    def sleep(self, seconds: float) -> None:
        time.sleep(seconds)


class VirtualClock:
    """Deterministic clock; ``sleep`` only advances the reading."""

    def __init__(self, start: float = 1_791_936_000.0):  # 2026-10-14T00:00:00Z
        self._t = float(start)

    def now(self) -> float:
        return self._t

    def sleep(self, seconds: float) -> None:
        self._t = round(self._t + max(seconds, 0.0), 6)

    advance = sleep


class Backend(Protocol):
    """What the Executor and Supervisor need from a device."""

    clock: Clock

    def screenshot(self) -> RasterImage: ...

    def tap(self, point: tuple[int, int]) -> None: ...

    def input_text(self, text: str) -> None: ...

    def scroll(self, direction: str, region: BoundingBox | None = None) -> None: ...

    def back(self) -> None: ...

    def read_log_since(self, ts: float) -> list[str]: ...

    def info(self) -> dict: ...


def supports_clear(backend) -> bool:
    return callable(getattr(backend, "clear_text", None))
