"""Recognizer backends: built-ins, the wire protocol, and adapter hosting."""

from __future__ import annotations

import sys
from pathlib import Path

from ..errors import BackendUnavailable
from .adapter_client import ExternalAdapterSession, open_transport
from .base import (
    BuiltinRecognizer,
    Hypothesis,
    NoiseModel,
    OracleRecognizer,
    Recognizer,
    ReplayRecognizer,
    mangle,
)
from .protocol import (
    ProtocolMessage,
    audio_message,
    decode_message,
    encode_message,
    message,
    pcm_from_audio,
)

BUILTIN_BACKENDS = ("oracle", "replay", "loopback")


def create_recognizer(
    backend: str,
    *,
    sample_rate: int,
    gold_tokens=None,
    clip_duration_s: float = 0.0,
    seed: int = 0,
    instability_p: float = 0.0,
    substitution_p: float = 0.0,
    decode_s: float = 0.0,
    script_path: str | None = None,
    timeout_s: float = 10.0,
) -> Recognizer:
    """Build the recognizer named by a backend spec string.

    "oracle" and "replay" run in-process; "loopback" launches the built-in
    adapter as a child process; "host:port" connects over TCP; anything else
    is treated as an adapter command line.
    """
    if backend == "oracle":
        if not gold_tokens:
            raise BackendUnavailable("oracle backend needs a gold transcript")
        return OracleRecognizer(
            gold_tokens,
            clip_duration_s,
            NoiseModel(instability_p=instability_p, substitution_p=substitution_p, seed=seed),
            sample_rate=sample_rate,
            decode_s=decode_s,
        )
    if backend == "replay":
        if script_path is None:
            raise BackendUnavailable("replay backend needs --script")
        lines = Path(script_path).read_text(encoding="utf-8").splitlines()
        return ReplayRecognizer(lines, sample_rate=sample_rate, decode_s=decode_s)
    if backend == "loopback":
        argv = [sys.executable, "-m", "isr_bench.backends.loopback"]
        if script_path is not None:
            argv += ["--script", script_path]
        return ExternalAdapterSession(
            argv, sample_rate=sample_rate, timeout_s=timeout_s, decode_s=decode_s
        )
    return ExternalAdapterSession(
        backend, sample_rate=sample_rate, timeout_s=timeout_s, decode_s=decode_s
    )


__all__ = [
    "BUILTIN_BACKENDS",
    "BuiltinRecognizer",
    "ExternalAdapterSession",
    "Hypothesis",
    "NoiseModel",
    "OracleRecognizer",
    "ProtocolMessage",
    "Recognizer",
    "ReplayRecognizer",
    "audio_message",
    "create_recognizer",
    "decode_message",
    "encode_message",
    "mangle",
    "message",
    "open_transport",
    "pcm_from_audio",
]
