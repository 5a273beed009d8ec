"""Real-device backend that drives an Android device through the ``adb`` bridge."""

from __future__ import annotations

import logging
import subprocess
from datetime import datetime, timezone

from ..errors import DeviceError
from ..raster import BoundingBox, RasterImage
from .base import SystemClock

log = logging.getLogger(__name__)

KEYCODE_BACK = 4
SWIPE_MS = 300

# Characters the device shell would otherwise interpret.
_SHELL_SPECIAL = set("\\'\"`$&|;<>()[]{}*?!~#")


def escape_input_text(text: str) -> str:
    out = []
    for ch in text:
        if ch == " ":
            out.append("%s")
        elif ch in _SHELL_SPECIAL:
            out.append("\\" + ch)
        else:
            out.append(ch)
    return "".join(out)


def _run(argv, timeout):
    proc = subprocess.run(argv, capture_output=True, timeout=timeout)
    return proc.returncode, proc.stdout, proc.stderr


class AdbBackend:
    """Issues ``adb`` commands. ``runner(argv, timeout) -> (code, stdout, stderr)`` is injectable."""

    def __init__(self, app_id: str, serial: str | None = None, adb: str = "adb",
                 size: tuple[int, int] | None = None, runner=None, timeout: float = 30.0, clock=None):
        self.app_id = app_id
        self.serial = serial
        self.adb = adb
        self.size = size
        self.runner = runner or _run
        self.timeout = timeout
        self.clock = clock or SystemClock()

    def _argv(self, *args) -> list[str]:
        base = [self.adb] + (["-s", self.serial] if self.serial else [])
        return base + [str(a) for a in args]

    def _call(self, *args) -> bytes:
        argv = self._argv(*args)
        try:
            code, out, err = self.runner(argv, self.timeout)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise DeviceError(f"device unreachable: {exc}") from exc
        if code != 0:
            msg = err.decode(errors="replace") if isinstance(err, bytes) else str(err)
            raise DeviceError(f"{' '.join(argv)} exited {code}: {msg.strip()[:200]}")
        return out if isinstance(out, bytes) else str(out).encode()

    def screenshot(self) -> RasterImage:
        img = RasterImage.from_png(self._call("exec-out", "screencap", "-p"))
        self.size = img.size
        return img

    def tap(self, point):
        self._call("shell", "input", "tap", int(point[0]), int(point[1]))

    def input_text(self, text):
        self._call("shell", "input", "text", escape_input_text(text))

    def scroll(self, direction, region: BoundingBox | None = None):
        if region is None:
            if self.size is None:
                self.screenshot()
            region = BoundingBox(0, 0, *self.size)
        cx, cy = region.center_px()
        dx, dy = region.w * 3 // 10, region.h * 3 // 10
        # Scrolling "down" reveals lower content, so the finger moves up.
        start, end = {
            "down": ((cx, cy + dy), (cx, cy - dy)),
            "up": ((cx, cy - dy), (cx, cy + dy)),
            "right": ((cx + dx, cy), (cx - dx, cy)),
            "left": ((cx - dx, cy), (cx + dx, cy)),
        }[direction]
        self._call("shell", "input", "swipe", *start, *end, SWIPE_MS)

    def back(self):
        self._call("shell", "input", "keyevent", KEYCODE_BACK)

    def read_log_since(self, ts: float) -> list[str]:
        dt = datetime.fromtimestamp(ts, tz=timezone.utc)
        since = dt.strftime("%Y-%m-%d %H:%M:%S.") + f"{dt.microsecond // 1000:03d}"
        out = self._call("logcat", "-d", "-v", "threadtime", "-v", "year", "-v", "UTC", "-T", since)
        return out.decode(errors="replace").splitlines()

    def info(self) -> dict:
        model = self._call("shell", "getprop", "ro.product.model").decode().strip()
        release = self._call("shell", "getprop", "ro.build.version.release").decode().strip()
        return {
            "device_info": f"{model} (Android {release})",
            "app_id": self.app_id,
            "app_info": self.app_id,
        }
