"""Client side of the external adapter protocol.

Hosts a recognizer that lives in a child process (newline-delimited JSON
over stdio) or behind a TCP socket. The exchange is strictly lockstep: the
client sends the segment audio plus one decode request and blocks for the
matching hypothesis.
"""

from __future__ import annotations

import os
import select
import shlex
import socket
import subprocess
import sys
import time
from typing import Sequence

from ..audio import AudioChunk
from ..clocks import Clock, MockClock
from ..errors import (
    AdapterCrashed,
    BackendUnavailable,
    DecodeFailure,
    HandshakeTimeout,
    SampleRateMismatch,
    SequenceMismatch,
)
from . import protocol
from .base import Hypothesis

ADAPTER_PATH_ENV = "ISR_BENCH_ADAPTER_PATH"

DEFAULT_TIMEOUT_S = 10.0


class _Deadline:
    def __init__(self, timeout_s: float) -> None:
        self._expires = time.monotonic() + timeout_s

    def remaining(self) -> float:
        return self._expires - time.monotonic()


class ProcessTransport:
    """Line transport over a child process's stdin/stdout."""

    def __init__(self, argv: Sequence[str]) -> None:
        env = os.environ.copy()
        adapter_path = env.get(ADAPTER_PATH_ENV)
        if adapter_path:
            env["PATH"] = adapter_path + os.pathsep + env.get("PATH", "")
        try:
            stderr_target = sys.stderr.fileno()
        except (AttributeError, OSError, ValueError):
            stderr_target = None  # no real fd behind sys.stderr; inherit
        try:
            self.proc = subprocess.Popen(
                list(argv),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=stderr_target,
                env=env,
            )
        except OSError as exc:
            raise BackendUnavailable(f"cannot launch adapter {argv!r}: {exc}") from exc
        self._buffer = b""

    def describe(self) -> str:
        return f"process pid={self.proc.pid}"

    def send_line(self, line: bytes) -> None:
        if self.proc.poll() is not None:
            raise AdapterCrashed(f"adapter exited with code {self.proc.returncode}")
        try:
            self.proc.stdin.write(line)
            self.proc.stdin.flush()
        except (BrokenPipeError, ValueError) as exc:
            raise AdapterCrashed(f"adapter closed its stdin: {exc}") from exc

    def recv_line(self, timeout_s: float) -> bytes | None:
        """One line, or None on timeout. Raises AdapterCrashed on EOF."""
        deadline = _Deadline(timeout_s)
        fd = self.proc.stdout.fileno()
        while b"\n" not in self._buffer:
            remaining = deadline.remaining()
            if remaining <= 0:
                return None
            readable, _, _ = select.select([fd], [], [], remaining)
            if not readable:
                return None
            data = os.read(fd, 65536)
            if not data:
                code = self.proc.poll()
                raise AdapterCrashed(f"adapter closed its stdout (exit code {code})")
            self._buffer += data
        line, self._buffer = self._buffer.split(b"\n", 1)
        return line + b"\n"

    def close(self) -> None:
        for stream in (self.proc.stdin, self.proc.stdout):
            try:
                stream.close()
            except OSError:
                pass
        if self.proc.poll() is None:
            self.proc.terminate()
            try:
                self.proc.wait(timeout=2.0)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()


class TcpTransport:
    """Line transport over a TCP connection."""

    def __init__(self, host: str, port: int, connect_timeout_s: float = 5.0) -> None:
        try:
            self.sock = socket.create_connection((host, port), timeout=connect_timeout_s)
        except OSError as exc:
            raise BackendUnavailable(f"cannot connect to {host}:{port}: {exc}") from exc
        self._buffer = b""
        self._addr = f"{host}:{port}"

    def describe(self) -> str:
        return f"tcp {self._addr}"

    def send_line(self, line: bytes) -> None:
        try:
            self.sock.sendall(line)
        except OSError as exc:
            raise AdapterCrashed(f"connection to {self._addr} broke: {exc}") from exc

    def recv_line(self, timeout_s: float) -> bytes | None:
        deadline = _Deadline(timeout_s)
        while b"\n" not in self._buffer:
            remaining = deadline.remaining()
            if remaining <= 0:
                return None
            self.sock.settimeout(remaining)
            try:
                data = self.sock.recv(65536)
            except socket.timeout:
                return None
            except OSError as exc:
                raise AdapterCrashed(f"connection to {self._addr} broke: {exc}") from exc
            if not data:
                raise AdapterCrashed(f"{self._addr} closed the connection")
            self._buffer += data
        line, self._buffer = self._buffer.split(b"\n", 1)
        return line + b"\n"

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass


def open_transport(target: str | Sequence[str]):
    """Launch or connect to an adapter.

    A "host:port" string opens a TCP connection; anything else is treated
    as a command line for a child process.
    """
    if isinstance(target, str):
        host, sep, port = target.rpartition(":")
        if sep and host and port.isdigit() and "/" not in host and " " not in host:
            return TcpTransport(host, int(port))
        argv = shlex.split(target)
    else:
        argv = list(target)
    if not argv:
        raise BackendUnavailable("empty adapter command")
    return ProcessTransport(argv)


class ExternalAdapterSession:
    """Recognizer backed by one adapter connection.

    Performs the init/ready handshake on construction; thereafter each
    recognize is one audio + decode round trip awaiting the hypothesis with
    the matching seq. finish sends eof instead of decode and expects the
    final hypothesis. reset clears adapter state between clips.
    """

    def __init__(
        self,
        target: str | Sequence[str],
        *,
        sample_rate: int,
        timeout_s: float = DEFAULT_TIMEOUT_S,
        decode_s: float = 0.0,
    ) -> None:
        self.sample_rate = sample_rate
        self.timeout_s = timeout_s
        self.decode_s = decode_s
        self._seq = 0
        self._dead = False
        self.transport = open_transport(target)
        try:
            self._handshake()
        except Exception:
            self.transport.close()
            raise

    def _handshake(self) -> None:
        self.transport.send_line(
            protocol.encode_message(
                protocol.message(
                    "init",
                    sample_rate=self.sample_rate,
                    encoding=protocol.PCM_ENCODING,
                    version=protocol.PROTOCOL_VERSION,
                )
            )
        )
        line = self.transport.recv_line(self.timeout_s)
        if line is None:
            raise HandshakeTimeout(
                f"no ready message within {self.timeout_s:.1f}s from {self.transport.describe()}"
            )
        msg = protocol.decode_message(line)
        if msg.type == "error":
            raise BackendUnavailable(f"adapter refused init: {msg['message']}")
        if msg.type != "ready":
            raise BackendUnavailable(f"expected ready after init, got {msg.type!r}")
        self.name = msg["name"]

    def _await_hypothesis(self, seq: int) -> protocol.ProtocolMessage:
        line = self.transport.recv_line(self.timeout_s)
        if line is None:
            self._dead = True
            raise BackendUnavailable(
                f"no hypothesis for seq {seq} within {self.timeout_s:.1f}s"
            )
        msg = protocol.decode_message(line)
        if msg.type == "error":
            self._dead = True
            raise DecodeFailure(f"adapter error: {msg['message']}")
        if msg.type != "hypothesis":
            self._dead = True
            raise SequenceMismatch(f"expected hypothesis, got {msg.type!r}")
        if msg["seq"] != seq:
            self._dead = True
            raise SequenceMismatch(f"hypothesis seq {msg['seq']} for request seq {seq}")
        return msg

    def _round_trip(self, segment: AudioChunk, clock: Clock, final: bool) -> Hypothesis:
        if self._dead:
            raise BackendUnavailable("adapter session already failed")
        if segment.sample_rate != self.sample_rate:
            raise SampleRateMismatch(
                f"segment at {segment.sample_rate} Hz, adapter set up at {self.sample_rate} Hz"
            )
        seq = self._seq
        self._seq += 1
        t_submit = clock.now()
        self.transport.send_line(protocol.encode_message(protocol.audio_message(seq, segment.pcm)))
        request = protocol.message("eof", seq=seq) if final else protocol.message("decode", seq=seq)
        self.transport.send_line(protocol.encode_message(request))
        msg = self._await_hypothesis(seq)
        if self.decode_s and isinstance(clock, MockClock):
            clock.advance(self.decode_s)
        return Hypothesis(
            raw_text=msg["text"],
            t_submit=t_submit,
            t_receive=clock.now(),
            final=msg["final"],
            decode_s=msg.get("decode_s"),
        )

    def recognize(self, segment: AudioChunk, clock: Clock) -> Hypothesis:
        return self._round_trip(segment, clock, final=False)

    def finish(self, segment: AudioChunk, clock: Clock) -> Hypothesis:
        return self._round_trip(segment, clock, final=True)

    def reset(self) -> None:
        if not self._dead:
            self.transport.send_line(protocol.encode_message(protocol.message("reset")))
        self._seq = 0

    def close(self) -> None:
        self.transport.close()
