"""Conformance checks for external recognizer adapters.

Each check runs against a fresh adapter instance (protocol errors are fatal
for a session, so checks stay independent) and reports pass/fail with a
short detail message.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .backends import protocol
from .backends.adapter_client import open_transport
from .errors import BenchError

CHECK_TIMEOUT_S = 5.0

_SILENCE = b"\x00\x00" * 1600  # 0.1 s at 16 kHz


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


class _Session:
    """Thin driving shim over one adapter connection."""

    def __init__(self, target, timeout_s: float) -> None:
        self.transport = open_transport(target)
        self.timeout_s = timeout_s

    def send(self, msg: protocol.ProtocolMessage) -> None:
        self.transport.send_line(protocol.encode_message(msg))

    def send_raw(self, line: bytes) -> None:
        self.transport.send_line(line)

    def recv(self) -> protocol.ProtocolMessage | None:
        line = self.transport.recv_line(self.timeout_s)
        if line is None:
            return None
        return protocol.decode_message(line)

    def handshake(self, sample_rate: int = 16000) -> protocol.ProtocolMessage | None:
        self.send(
            protocol.message(
                "init",
                sample_rate=sample_rate,
                encoding=protocol.PCM_ENCODING,
                version=protocol.PROTOCOL_VERSION,
            )
        )
        return self.recv()

    def decode_round_trip(self, seq: int, final: bool = False) -> protocol.ProtocolMessage | None:
        self.send(protocol.audio_message(seq, _SILENCE))
        self.send(protocol.message("eof" if final else "decode", seq=seq))
        return self.recv()

    def close(self) -> None:
        self.transport.close()


def _expect_hypothesis(msg: protocol.ProtocolMessage | None, seq: int, final: bool | None = None) -> str:
    if msg is None:
        return "timed out waiting for hypothesis"
    if msg.type != "hypothesis":
        return f"expected hypothesis, got {msg.type}"
    if msg["seq"] != seq:
        return f"hypothesis seq {msg['seq']}, expected {seq}"
    if final is not None and msg["final"] is not final:
        return f"hypothesis final={msg['final']}, expected {final}"
    return ""


def _check_handshake(session: _Session) -> str:
    msg = session.handshake()
    if msg is None:
        return "no ready message before timeout"
    if msg.type != "ready":
        return f"expected ready, got {msg.type}"
    if not msg["name"]:
        return "ready carried an empty adapter name"
    return ""


def _check_decode(session: _Session) -> str:
    session.handshake()
    return _expect_hypothesis(session.decode_round_trip(0), seq=0, final=False)


def _check_sequencing(session: _Session) -> str:
    session.handshake()
    problem = _expect_hypothesis(session.decode_round_trip(0), seq=0)
    if problem:
        return problem
    return _expect_hypothesis(session.decode_round_trip(1), seq=1)


def _check_idempotent_decode(session: _Session) -> str:
    session.handshake()
    first = session.decode_round_trip(0)
    problem = _expect_hypothesis(first, seq=0)
    if problem:
        return problem
    session.send(protocol.message("decode", seq=0))
    second = session.recv()
    problem = _expect_hypothesis(second, seq=0)
    if problem:
        return problem
    if first["text"] != second["text"]:
        return f"decode not idempotent: {first['text']!r} then {second['text']!r}"
    return ""


def _check_reset(session: _Session) -> str:
    session.handshake()
    problem = _expect_hypothesis(session.decode_round_trip(0), seq=0)
    if problem:
        return problem
    session.send(protocol.message("reset"))
    # seq restarts at 0 after reset
    return _expect_hypothesis(session.decode_round_trip(0), seq=0)


def _check_eof(session: _Session) -> str:
    session.handshake()
    return _expect_hypothesis(session.decode_round_trip(0, final=True), seq=0, final=True)


def _check_malformed_input(session: _Session) -> str:
    session.handshake()
    session.send_raw(b"this is not a protocol line\n")
    try:
        msg = session.recv()
    except BenchError as exc:
        return f"adapter answered garbage with garbage: {exc}"
    if msg is None:
        return "no error message for a malformed line"
    if msg.type != "error":
        return f"expected error for malformed line, got {msg.type}"
    return ""


CHECKS: Sequence[tuple[str, Callable[[_Session], str]]] = (
    ("handshake", _check_handshake),
    ("decode-round-trip", _check_decode),
    ("sequencing", _check_sequencing),
    ("idempotent-decode", _check_idempotent_decode),
    ("reset", _check_reset),
    ("eof-final", _check_eof),
    ("malformed-input", _check_malformed_input),
)


def run_protocol_checks(target, timeout_s: float = CHECK_TIMEOUT_S) -> list[CheckResult]:
    """Run every conformance check, each against a fresh adapter."""
    results = []
    for name, check in CHECKS:
        session = None
        try:
            session = _Session(target, timeout_s)
            detail = check(session)
        except BenchError as exc:
            detail = f"{type(exc).__name__}: {exc}"
        finally:
            if session is not None:
                session.close()
        results.append(CheckResult(name=name, ok=not detail, detail=detail))
    return results
