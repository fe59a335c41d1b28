import math
import struct
import wave
from pathlib import Path

import pytest

SAMPLE_RATE = 16000


def write_wav(path: Path, n_samples: int, sample_rate: int = SAMPLE_RATE,
              channels: int = 1, sampwidth: int = 2) -> Path:
    """Write a sine-filled WAV via the stdlib writer (independent of our parser)."""
    frames = bytearray()
    for i in range(n_samples):
        value = int(12000 * math.sin(2 * math.pi * 220 * i / sample_rate))
        if sampwidth == 2:
            sample = struct.pack("<h", value)
        else:
            sample = struct.pack("B", (value >> 8) + 128)
        frames += sample * channels
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(channels)
        fh.setsampwidth(sampwidth)
        fh.setframerate(sample_rate)
        fh.writeframes(bytes(frames))
    return path


@pytest.fixture
def wav_factory(tmp_path):
    counter = iter(range(10_000))

    def factory(n_samples: int, **kwargs) -> Path:
        return write_wav(tmp_path / f"clip{next(counter)}.wav", n_samples, **kwargs)

    return factory


@pytest.fixture
def manifest_factory(tmp_path):
    """Build a JSONL manifest of synthetic clips with given transcripts."""
    import json

    counter = iter(range(10_000))

    def factory(transcripts, seconds_per_word: float = 0.4, sample_rate: int = SAMPLE_RATE):
        stamp = next(counter)
        root = tmp_path / f"dataset{stamp}"
        root.mkdir()
        lines = []
        for i, text in enumerate(transcripts):
            n_words = max(1, len(text.split()))
            n_samples = int(n_words * seconds_per_word * sample_rate)
            wav = write_wav(root / f"utt{i}.wav", n_samples, sample_rate=sample_rate)
            lines.append(json.dumps({"id": f"utt{i}", "audio": wav.name, "text": text}))
        manifest = root / "manifest.jsonl"
        manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return manifest

    return factory
