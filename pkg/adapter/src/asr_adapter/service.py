"""Protocol event loop.

Wire format: one JSON object per line over stdio, audio as base64 of
little-endian 16-bit PCM, lockstep decode requests:

    -> {"type":"init","sample_rate":16000,"encoding":"pcm_s16le","version":1}
    <- {"type":"ready","name":"..."}
    -> {"type":"audio","seq":K,"data":"<base64>"}
    -> {"type":"decode","seq":K}          (or {"type":"eof","seq":K} at clip end)
    <- {"type":"hypothesis","seq":K,"text":"...","final":false,"decode_s":...}
    -> {"type":"reset"}                    (clears all buffers between clips)
    <- {"type":"error","message":"..."}    (fatal; the process exits nonzero)

Audio is buffered per seq; a decode for seq K consumes every pending buffer
up to K, in order, as one segment. Results are cached per seq so repeating
a decode without new audio returns identical text.
"""

from __future__ import annotations

import base64
import binascii
import json
import time

PROTOCOL_VERSION = 1
SUPPORTED_ENCODING = "pcm_s16le"


class ProtocolViolation(Exception):
    pass


def _require(obj: dict, field: str, kinds: tuple[type, ...]):
    if field not in obj:
        raise ProtocolViolation(f"{obj.get('type', '?')} message is missing {field!r}")
    value = obj[field]
    if not isinstance(value, kinds) or (kinds == (int,) and isinstance(value, bool)):
        raise ProtocolViolation(f"{obj.get('type', '?')}.{field} has the wrong type")
    return value


class AdapterService:
    def __init__(self, engine, name: str | None = None) -> None:
        self.engine = engine
        self.name = name or f"asr-stdio-adapter/{engine.name}"
        self.sample_rate: int | None = None
        self.pending: dict[int, bytearray] = {}
        self.cache: dict[int, str] = {}

    # -- message handling ---------------------------------------------------

    def _on_init(self, obj: dict) -> dict:
        self.sample_rate = _require(obj, "sample_rate", (int,))
        encoding = _require(obj, "encoding", (str,))
        version = _require(obj, "version", (int,))
        if encoding != SUPPORTED_ENCODING:
            raise ProtocolViolation(f"unsupported encoding {encoding!r}")
        if version != PROTOCOL_VERSION:
            raise ProtocolViolation(f"unsupported protocol version {version}")
        if self.sample_rate <= 0:
            raise ProtocolViolation(f"bad sample rate {self.sample_rate}")
        return {"type": "ready", "name": self.name}

    def _on_audio(self, obj: dict) -> None:
        seq = _require(obj, "seq", (int,))
        data = _require(obj, "data", (str,))
        try:
            pcm = base64.b64decode(data, validate=True)
        except (binascii.Error, ValueError) as exc:
            raise ProtocolViolation(f"audio data is not valid base64: {exc}") from exc
        self.pending.setdefault(seq, bytearray()).extend(pcm)

    def _on_decode(self, obj: dict, final: bool) -> dict:
        seq = _require(obj, "seq", (int,))
        ready = sorted(k for k in self.pending if k <= seq)
        started = time.monotonic()
        if ready:
            segment = b"".join(bytes(self.pending.pop(k)) for k in ready)
            self.cache[seq] = self.engine.decode(segment, self.sample_rate)
        return {
            "type": "hypothesis",
            "seq": seq,
            "text": self.cache.get(seq, ""),
            "final": final,
            "decode_s": round(time.monotonic() - started, 6),
        }

    def _on_reset(self) -> None:
        self.pending.clear()
        self.cache.clear()
        self.engine.reset()

    def handle(self, obj: dict) -> dict | None:
        kind = obj.get("type")
        if self.sample_rate is None:
            if kind != "init":
                raise ProtocolViolation(f"expected init first, got {kind!r}")
            return self._on_init(obj)
        if kind == "audio":
            self._on_audio(obj)
            return None
        if kind == "decode":
            return self._on_decode(obj, final=False)
        if kind == "eof":
            return self._on_decode(obj, final=True)
        if kind == "reset":
            self._on_reset()
            return None
        if kind == "init":
            raise ProtocolViolation("init repeated mid-session")
        raise ProtocolViolation(f"unexpected message type {kind!r}")

    # -- line loop ------------------------------------------------------------

    def serve(self, stdin, stdout) -> int:
        """Read lines until EOF. Protocol violations are fatal: an error
        message is emitted and the loop exits nonzero."""

        def emit(payload: dict) -> None:
            stdout.write((json.dumps(payload, sort_keys=True) + "\n").encode())
            stdout.flush()

        for raw in stdin:
            try:
                obj = json.loads(raw.decode("utf-8"))
                if not isinstance(obj, dict):
                    raise ProtocolViolation("line is not a JSON object")
                reply = self.handle(obj)
            except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                emit({"type": "error", "message": f"line is not valid JSON: {exc}"})
                return 1
            except ProtocolViolation as exc:
                emit({"type": "error", "message": str(exc)})
                return 1
            except Exception as exc:  # engine failure is unrecoverable
                emit({"type": "error", "message": f"engine failure: {exc}"})
                return 2
            if reply is not None:
                emit(reply)
        return 0
