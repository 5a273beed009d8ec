"""The Executor: grounded operation -> backend calls."""

from __future__ import annotations

from ..errors import DeviceError, ExecutionError
from .operations import ExecutionRecord, Operation, OpKind


def _plan(op: Operation) -> list[tuple[str, tuple]]:
    if op.kind is OpKind.CLICK:
        return [("tap", (op.tap_point,))]
    if op.kind is OpKind.INPUT:
        # Focus first, then type.
        return [("tap", (op.tap_point,)), ("input_text", (op.text,))]
    if op.kind is OpKind.SCROLL:
        return [("scroll", (op.direction, op.region))]
    if op.kind is OpKind.BACK:
        return [("back", ())]
    return []


def execute(op: Operation, backend) -> ExecutionRecord:
    clock = backend.clock
    record = ExecutionRecord(op=op, started=clock.now())
    for i, (name, args) in enumerate(_plan(op)):
        try:
            getattr(backend, name)(*args)
        except DeviceError as exc:
            record.result = "error"
            record.finished = clock.now()
            raise ExecutionError(str(exc), i) from exc
        entry = {"action": name}
        if name == "tap":
            entry["point"] = list(args[0])
        elif name == "input_text":
            entry["text"] = args[0]
        elif name == "scroll":
            entry["direction"] = args[0]
            if args[1] is not None:
                entry["region"] = args[1].as_list()
        record.sub_actions.append(entry)
    record.finished = clock.now()
    return record
