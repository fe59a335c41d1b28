"""Built-in loopback adapter: the protocol reference fixture.

Runs as a child process (`python -m isr_bench.backends.loopback`) speaking
the wire protocol over stdio. By default each decode answers with a
deterministic placeholder; with --script it replays one scripted hypothesis
line per decode, which lets end-to-end tests drive a real subprocess
without any speech engine.

--misbehave deliberately breaks one protocol rule so client error handling
and the protocol-check command have something to catch.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import BackendError
from . import protocol

MISBEHAVE_MODES = ("no-ready", "wrong-seq", "garbage", "silent")


class LoopbackAdapter:
    def __init__(self, script: list[str] | None = None, misbehave: str | None = None) -> None:
        self.script = script
        self.misbehave = misbehave
        self.sample_rate: int | None = None
        self.pending: dict[int, bytearray] = {}
        self.cache: dict[int, str] = {}
        self.decode_count = 0

    def _emit(self, msg: protocol.ProtocolMessage, out) -> None:
        out.write(protocol.encode_message(msg))
        out.flush()

    def _fail(self, out, text: str) -> None:
        self._emit(protocol.message("error", message=text), out)

    def _text_for(self, seq: int) -> str:
        if self.script is not None:
            index = min(self.decode_count, len(self.script) - 1)
            text = self.script[index] if self.script else ""
        else:
            text = f"word{seq}"
        self.decode_count += 1
        return text

    def _decode(self, seq: int, final: bool, out) -> None:
        if any(k <= seq for k in self.pending):
            for k in sorted(k for k in self.pending if k <= seq):
                del self.pending[k]
            self.cache[seq] = self._text_for(seq)
        text = self.cache.get(seq, "")
        reply_seq = seq + 1 if self.misbehave == "wrong-seq" else seq
        if self.misbehave == "garbage":
            out.write(b"this is not json\n")
            out.flush()
            return
        if self.misbehave == "silent":
            return
        self._emit(
            protocol.message("hypothesis", seq=reply_seq, text=text, final=final), out
        )

    def serve(self, stdin, stdout) -> int:
        initialized = False
        for raw in stdin:
            try:
                msg = protocol.decode_message(raw)
            except BackendError as exc:
                self._fail(stdout, f"bad line: {exc}")
                return 1
            if not initialized:
                if msg.type != "init":
                    self._fail(stdout, f"expected init, got {msg.type}")
                    return 1
                self.sample_rate = msg["sample_rate"]
                initialized = True
                if self.misbehave != "no-ready":
                    self._emit(protocol.message("ready", name="loopback"), stdout)
                continue
            if msg.type == "audio":
                self.pending.setdefault(msg["seq"], bytearray()).extend(
                    protocol.pcm_from_audio(msg)
                )
            elif msg.type == "decode":
                self._decode(msg["seq"], final=False, out=stdout)
            elif msg.type == "eof":
                self._decode(msg["seq"], final=True, out=stdout)
            elif msg.type == "reset":
                self.pending.clear()
                self.cache.clear()
                self.decode_count = 0
            else:
                self._fail(stdout, f"unexpected message type {msg.type}")
                return 1
        return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="loopback recognizer adapter")
    parser.add_argument("--script", type=Path, help="file with one hypothesis line per decode")
    parser.add_argument("--misbehave", choices=MISBEHAVE_MODES, help="break one protocol rule")
    args = parser.parse_args(argv)

    script = None
    if args.script is not None:
        script = args.script.read_text(encoding="utf-8").splitlines()
    adapter = LoopbackAdapter(script=script, misbehave=args.misbehave)
    return adapter.serve(sys.stdin.buffer, sys.stdout.buffer)


if __name__ == "__main__":
    sys.exit(main())
