"""Executor backends: device contract, adb adapter, simulated apps."""

from .adb import AdbBackend
from .base import Backend, SystemClock, VirtualClock, supports_clear
from .executor import execute
from .operations import ACTION_TYPES, DIRECTIONS, OPPOSITE, ExecutionRecord, Operation, OpKind
from .sim import SimAppSpec, SimBackend

__all__ = [
    "ACTION_TYPES", "AdbBackend", "Backend", "DIRECTIONS", "ExecutionRecord", "OPPOSITE", "OpKind",
    "Operation", "SimAppSpec", "SimBackend", "SystemClock", "VirtualClock", "execute", "supports_clear",
]
