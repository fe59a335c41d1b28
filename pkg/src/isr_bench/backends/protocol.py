"""Wire protocol for external recognizer adapters.

Messages are single lines of UTF-8 JSON terminated by "\\n". Audio payloads
are base64 of little-endian 16-bit PCM. The exchange is lockstep: one
decode request outstanding at a time, seq starting at 0 per clip.

    -> {"type":"init","sample_rate":16000,"encoding":"pcm_s16le","version":1}
    <- {"type":"ready","name":"<adapter name>"}
    -> {"type":"audio","seq":K,"data":"<base64 pcm>"}
    -> {"type":"decode","seq":K}
    <- {"type":"hypothesis","seq":K,"text":"...","final":false}
    -> {"type":"reset"}
    -> {"type":"eof","seq":K}
    <- {"type":"hypothesis","seq":K,"text":"...","final":true}
    <- {"type":"error","message":"..."}   (any point; fatal for the session)
"""

from __future__ import annotations

import base64
import binascii
import json
from dataclasses import dataclass, field

from ..errors import BadBase64, MalformedLine, UnknownType

PROTOCOL_VERSION = 1
PCM_ENCODING = "pcm_s16le"

# required field name -> accepted types (bool is excluded from int fields)
_FIELD_SPECS: dict[str, dict[str, tuple[type, ...]]] = {
    "init": {"sample_rate": (int,), "encoding": (str,), "version": (int,)},
    "ready": {"name": (str,)},
    "audio": {"seq": (int,), "data": (str,)},
    "decode": {"seq": (int,)},
    "hypothesis": {"seq": (int,), "text": (str,), "final": (bool,)},
    "reset": {},
    "eof": {"seq": (int,)},
    "error": {"message": (str,)},
}


@dataclass(frozen=True)
class ProtocolMessage:
    type: str
    fields: dict = field(default_factory=dict)

    def __getitem__(self, key: str):
        return self.fields[key]

    def get(self, key: str, default=None):
        return self.fields.get(key, default)


def message(msg_type: str, **fields) -> ProtocolMessage:
    """Build and validate a protocol message."""
    msg = ProtocolMessage(msg_type, fields)
    _validate(msg)
    return msg


def _validate(msg: ProtocolMessage) -> None:
    spec = _FIELD_SPECS.get(msg.type)
    if spec is None:
        raise UnknownType(f"unknown message type {msg.type!r}")
    for name, types in spec.items():
        if name not in msg.fields:
            raise MalformedLine(f"{msg.type} message is missing field {name!r}")
        value = msg.fields[name]
        if not isinstance(value, types) or (
            types == (int,) and isinstance(value, bool)
        ):
            raise MalformedLine(
                f"{msg.type}.{name} has type {type(value).__name__}, "
                f"expected {'/'.join(t.__name__ for t in types)}"
            )
    if msg.type == "audio":
        try:
            base64.b64decode(msg.fields["data"], validate=True)
        except (binascii.Error, ValueError) as exc:
            raise BadBase64(f"audio payload is not valid base64: {exc}") from exc


def encode_message(msg: ProtocolMessage) -> bytes:
    """Serialize a message to one newline-terminated JSON line."""
    _validate(msg)
    payload = {"type": msg.type, **msg.fields}
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode() + b"\n"


def decode_message(line: bytes | str) -> ProtocolMessage:
    """Parse one line into a message; the inverse of encode_message."""
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedLine(f"line is not UTF-8: {exc}") from exc
    line = line.strip()
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedLine(f"line is not JSON: {line[:80]!r}") from exc
    if not isinstance(obj, dict) or not isinstance(obj.get("type"), str):
        raise MalformedLine(f"line is not a protocol object: {line[:80]!r}")
    msg_type = obj.pop("type")
    msg = ProtocolMessage(msg_type, obj)
    _validate(msg)
    return msg


def audio_message(seq: int, pcm: bytes) -> ProtocolMessage:
    return message("audio", seq=seq, data=base64.b64encode(pcm).decode("ascii"))


def pcm_from_audio(msg: ProtocolMessage) -> bytes:
    if msg.type != "audio":
        raise UnknownType(f"expected audio message, got {msg.type}")
    return base64.b64decode(msg.fields["data"])
