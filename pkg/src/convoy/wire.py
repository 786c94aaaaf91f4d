"""Gateway wire protocol: one JSON object per text frame.

Every message is self-describing via its `type` field; unknown types get
an `error` reply instead of a disconnect.  See docs/wire_protocol.md for
the message-by-message reference.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .scenarios import MAX_HEADING_DELTA

TYPES = ("state", "steer", "speed", "gains", "pause", "resume", "reset", "hello", "error")


class WireError(ValueError):
    pass


@dataclass(frozen=True)
class WireMessage:
    type: str
    payload: dict = field(default_factory=dict)

    def encode(self) -> str:
        return json.dumps({"type": self.type, **self.payload}, sort_keys=True)


def decode(text: str) -> WireMessage:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WireError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "type" not in doc:
        raise WireError("message must be an object with a `type` field")
    mtype = doc.pop("type")
    if mtype not in TYPES:
        raise WireError(f"unknown message type {mtype!r}")
    _validate(mtype, doc)
    return WireMessage(mtype, doc)


def _require_number(payload: dict, key: str) -> float:
    v = payload.get(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
        raise WireError(f"`{key}` must be a finite number")
    return float(v)


def _validate(mtype: str, payload: dict) -> None:
    if mtype == "steer":
        r = _require_number(payload, "radians")
        if abs(r) > MAX_HEADING_DELTA + 1e-12:
            raise WireError("heading delta limited to 45 deg per message")
    elif mtype == "speed":
        _require_number(payload, "mps")
    elif mtype == "gains":
        for key in ("lambda1", "lambda2", "lambda3"):
            if _require_number(payload, key) <= 0:
                raise WireError(f"`{key}` must be positive")


def error_message(reason: str) -> WireMessage:
    return WireMessage("error", {"message": reason})


def state_message(snapshot_dict: dict) -> WireMessage:
    return WireMessage("state", {"snapshot": snapshot_dict})
