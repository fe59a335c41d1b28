"""WAV loading and chunk slicing.

Audio is kept as raw 16-bit little-endian PCM bytes. The harness never
resamples or remixes: a file either matches the expected shape (RIFF/WAVE,
integer PCM, 16-bit, mono) or loading fails with a specific error.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import (
    EmptyAudio,
    EmptySequence,
    InvalidChunkSize,
    MixedSampleRate,
    MultiChannel,
    NotWav,
    UnsupportedEncoding,
)

BYTES_PER_SAMPLE = 2  # PCM s16le

WAVE_FORMAT_PCM = 0x0001


@dataclass(frozen=True)
class AudioClip:
    """A whole mono recording.

    pcm holds little-endian signed 16-bit samples; duration is derived,
    exact to one sample.
    """

    pcm: bytes
    sample_rate: int
    channels: int = 1

    def __post_init__(self) -> None:
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if len(self.pcm) % BYTES_PER_SAMPLE:
            raise ValueError("pcm length is not a whole number of 16-bit samples")

    @property
    def sample_count(self) -> int:
        return len(self.pcm) // BYTES_PER_SAMPLE

    @property
    def duration_seconds(self) -> float:
        return self.sample_count / self.sample_rate


@dataclass(frozen=True)
class AudioChunk:
    """A contiguous slice of a stream.

    index is the ordinal position in the chunk stream; start_sample locates
    the first sample within the source clip so that recognizers and window
    bookkeeping can reason about spans.
    """

    pcm: bytes
    sample_rate: int
    index: int
    start_sample: int = 0

    def __post_init__(self) -> None:
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if len(self.pcm) % BYTES_PER_SAMPLE:
            raise ValueError("pcm length is not a whole number of 16-bit samples")

    @property
    def sample_count(self) -> int:
        return len(self.pcm) // BYTES_PER_SAMPLE

    @property
    def end_sample(self) -> int:
        return self.start_sample + self.sample_count

    @property
    def duration_seconds(self) -> float:
        return self.sample_count / self.sample_rate


def load_wav(path: str | Path) -> AudioClip:
    """Read a RIFF/WAVE file into an AudioClip.

    Only integer PCM, 16-bit, mono is accepted. Stereo input raises
    MultiChannel rather than being silently downmixed, and non-PCM or
    non-16-bit payloads raise UnsupportedEncoding.
    """
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise NotWav(f"{path}: not a RIFF/WAVE file")

    fmt_body: bytes | None = None
    pcm: bytes | None = None
    offset = 12
    while offset + 8 <= len(data):
        chunk_id = data[offset : offset + 4]
        (size,) = struct.unpack_from("<I", data, offset + 4)
        body = data[offset + 8 : offset + 8 + size]
        if chunk_id == b"fmt " and fmt_body is None:
            fmt_body = body
        elif chunk_id == b"data" and pcm is None:
            pcm = body
        if fmt_body is not None and pcm is not None:
            break
        offset += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt_body is None or pcm is None:
        raise NotWav(f"{path}: missing fmt or data chunk")
    if len(fmt_body) < 16:
        raise NotWav(f"{path}: fmt chunk truncated")

    audio_format, n_channels, sample_rate, _, _, bits = struct.unpack_from(
        "<HHIIHH", fmt_body, 0
    )
    if audio_format != WAVE_FORMAT_PCM:
        raise UnsupportedEncoding(
            f"{path}: format tag {audio_format:#06x}, only integer PCM is supported"
        )
    if bits != 16:
        raise UnsupportedEncoding(f"{path}: {bits}-bit PCM, only 16-bit is supported")
    if n_channels != 1:
        raise MultiChannel(f"{path}: {n_channels} channels, expected mono")
    if sample_rate <= 0:
        raise NotWav(f"{path}: invalid sample rate {sample_rate}")
    if len(pcm) % BYTES_PER_SAMPLE:
        pcm = pcm[: len(pcm) - 1]  # stray pad byte on a truncated writer
    if not pcm:
        raise EmptyAudio(f"{path}: data chunk holds zero samples")
    return AudioClip(pcm=bytes(pcm), sample_rate=sample_rate, channels=1)


def chunk(clip: AudioClip, chunk_ms: int) -> list[AudioChunk]:
    """Slice a clip into fixed-duration chunks that simulate live streaming.

    Every chunk except possibly the last holds round(chunk_ms * rate / 1000)
    samples; the last may be shorter but never empty. Concatenating the
    chunks reproduces the clip byte for byte.
    """
    if chunk_ms <= 0:
        raise InvalidChunkSize(f"chunk_ms must be positive, got {chunk_ms}")
    if clip.sample_count == 0:
        raise EmptyAudio("cannot chunk an empty clip")
    samples_per_chunk = round(chunk_ms * clip.sample_rate / 1000)
    if samples_per_chunk <= 0:
        raise InvalidChunkSize(
            f"chunk_ms={chunk_ms} is shorter than one sample at {clip.sample_rate} Hz"
        )
    chunks = []
    for i, start in enumerate(range(0, clip.sample_count, samples_per_chunk)):
        lo = start * BYTES_PER_SAMPLE
        hi = min(start + samples_per_chunk, clip.sample_count) * BYTES_PER_SAMPLE
        chunks.append(
            AudioChunk(
                pcm=clip.pcm[lo:hi],
                sample_rate=clip.sample_rate,
                index=i,
                start_sample=start,
            )
        )
    return chunks


def concat(chunks: Sequence[AudioChunk]) -> AudioChunk:
    """Concatenate chunks in order into one chunk.

    The result keeps the first chunk's index and stream offset; sample data
    is the exact in-order byte concatenation.
    """
    if not chunks:
        raise EmptySequence("concat needs at least one chunk")
    rates = {c.sample_rate for c in chunks}
    if len(rates) != 1:
        raise MixedSampleRate(f"cannot concat chunks at rates {sorted(rates)}")
    if len(chunks) == 1:
        return chunks[0]
    first = chunks[0]
    return AudioChunk(
        pcm=b"".join(c.pcm for c in chunks),
        sample_rate=first.sample_rate,
        index=first.index,
        start_sample=first.start_sample,
    )
