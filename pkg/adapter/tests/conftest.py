import base64
import json
import os
import select
import subprocess
import sys

import pytest


class AdapterProc:
    """Raw line-level driver for an adapter subprocess."""

    def __init__(self, argv):
        self.proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.PIPE
        )
        self._buf = b""

    def send(self, obj_or_line) -> None:
        if isinstance(obj_or_line, (bytes, str)):
            line = obj_or_line if isinstance(obj_or_line, bytes) else obj_or_line.encode()
            if not line.endswith(b"\n"):
                line += b"\n"
        else:
            line = json.dumps(obj_or_line).encode() + b"\n"
        self.proc.stdin.write(line)
        self.proc.stdin.flush()

    def recv(self, timeout_s: float = 5.0):
        import time

        deadline = time.monotonic() + timeout_s
        fd = self.proc.stdout.fileno()
        while b"\n" not in self._buf:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return None
            ready, _, _ = select.select([fd], [], [], remaining)
            if not ready:
                return None
            data = os.read(fd, 65536)
            if not data:
                return None
            self._buf += data
        line, self._buf = self._buf.split(b"\n", 1)
        return json.loads(line)

    def init(self, sample_rate: int = 16000):
        self.send(
            {
                "type": "init",
                "sample_rate": sample_rate,
                "encoding": "pcm_s16le",
                "version": 1,
            }
        )
        return self.recv()

    def send_audio(self, seq: int, pcm: bytes) -> None:
        self.send({"type": "audio", "seq": seq, "data": base64.b64encode(pcm).decode()})

    def decode(self, seq: int, final: bool = False):
        self.send({"type": "eof" if final else "decode", "seq": seq})
        return self.recv()

    def close(self) -> int:
        try:
            self.proc.stdin.close()
        except OSError:
            pass
        try:
            return self.proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self.proc.kill()
            return self.proc.wait()


@pytest.fixture
def echo_script(tmp_path):
    path = tmp_path / "script.txt"
    path.write_text("should\nshowed\nshowed again\n", encoding="utf-8")
    return path


@pytest.fixture
def adapter(echo_script):
    proc = AdapterProc(
        [sys.executable, "-m", "asr_adapter", "--echo", str(echo_script)]
    )
    yield proc
    proc.close()


def silence(seconds: float = 0.1, rate: int = 16000) -> bytes:
    return b"\x00\x00" * int(seconds * rate)
