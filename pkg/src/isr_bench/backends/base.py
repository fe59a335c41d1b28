"""Recognizer contract and the built-in deterministic backends.

The replay backend echoes a script (byte-exact reproduction of event
sequences); the oracle backend emits the gold transcript for whatever audio
span it is shown, optionally corrupted by a seeded noise model so that
instability metrics have something to measure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Protocol, Sequence, runtime_checkable

from ..audio import AudioChunk
from ..clocks import Clock, MockClock
from ..errors import SampleRateMismatch
from ..iu import normalize_tokens


@dataclass(frozen=True)
class Hypothesis:
    """One recognizer output for one audio submission.

    tokens are derived from raw_text by normalize_tokens; t_submit/t_receive
    come from the session clock around the recognize call.
    """

    raw_text: str
    t_submit: float
    t_receive: float
    final: bool = False
    decode_s: float | None = None  # adapter-reported decode time, diagnostic only
    tokens: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        if self.t_receive < self.t_submit:
            raise ValueError("t_receive precedes t_submit")
        object.__setattr__(self, "tokens", tuple(normalize_tokens(self.raw_text)))

    @property
    def elapsed(self) -> float:
        return self.t_receive - self.t_submit

    @property
    def n_words(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class NoiseModel:
    """Seeded corruption knobs for the oracle backend.

    instability_p is the probability that a just-emitted word is temporarily
    mangled and reverts on the next call (guaranteeing a revoke downstream);
    substitution_p permanently mangles a word (hurting WER but not
    stability). Identical seed and inputs give identical outputs.
    """

    instability_p: float = 0.0
    substitution_p: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("instability_p", "substitution_p"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")


@runtime_checkable
class Recognizer(Protocol):
    """Blocking request/response recognizer serving one session."""

    name: str

    def recognize(self, segment: AudioChunk, clock: Clock) -> Hypothesis: ...

    def finish(self, segment: AudioChunk, clock: Clock) -> Hypothesis: ...

    def reset(self) -> None: ...

    def close(self) -> None: ...


def mangle(token: str) -> str:
    """Deterministically produce a different, normalization-stable token."""
    return token + ("q" if token.endswith("x") else "x")


class BuiltinRecognizer:
    """Shared recognize plumbing for in-process backends.

    Subclasses implement _decode. With a mock clock, decode_s simulates the
    decode duration so latency metrics are deterministic; with a real clock
    the measured elapsed time is whatever the call actually took.
    """

    name = "builtin"

    def __init__(self, *, sample_rate: int | None = None, decode_s: float = 0.0) -> None:
        self.sample_rate = sample_rate
        self.decode_s = decode_s

    def _decode(self, segment: AudioChunk, final: bool) -> str:
        raise NotImplementedError

    def _check(self, segment: AudioChunk) -> None:
        if self.sample_rate is not None and segment.sample_rate != self.sample_rate:
            raise SampleRateMismatch(
                f"{self.name}: segment at {segment.sample_rate} Hz, "
                f"backend set up at {self.sample_rate} Hz"
            )

    def _recognize(self, segment: AudioChunk, clock: Clock, final: bool) -> Hypothesis:
        self._check(segment)
        t_submit = clock.now()
        text = self._decode(segment, final)
        if self.decode_s and isinstance(clock, MockClock):
            clock.advance(self.decode_s)
        return Hypothesis(raw_text=text, t_submit=t_submit, t_receive=clock.now(), final=final)

    def recognize(self, segment: AudioChunk, clock: Clock) -> Hypothesis:
        return self._recognize(segment, clock, final=False)

    def finish(self, segment: AudioChunk, clock: Clock) -> Hypothesis:
        return self._recognize(segment, clock, final=True)

    def reset(self) -> None:
        pass

    def close(self) -> None:
        pass


class ReplayRecognizer(BuiltinRecognizer):
    """Returns scripted hypotheses verbatim, one per recognize call.

    Calls past the end of the script clamp to the last entry; an empty
    script always answers with an empty hypothesis.
    """

    name = "replay"

    def __init__(self, script: Sequence[str], **kwargs) -> None:
        super().__init__(**kwargs)
        self.script = list(script)
        self.call_index = 0

    def _decode(self, segment: AudioChunk, final: bool) -> str:
        index = self.call_index
        self.call_index += 1
        if not self.script:
            return ""
        return self.script[min(index, len(self.script) - 1)]

    def reset(self) -> None:
        self.call_index = 0


class OracleRecognizer(BuiltinRecognizer):
    """Emits the gold words whose assigned midpoint lies in the shown span.

    Gold words are aligned uniformly over the clip duration (word j of G
    covers the span around midpoint (j + 0.5) * D / G). Noise-free, the
    oracle yields zero revokes under any streaming strategy, which anchors
    the stability metrics at zero.
    """

    name = "oracle"

    def __init__(
        self,
        gold_tokens: Sequence[str],
        clip_duration_s: float,
        noise: NoiseModel = NoiseModel(),
        **kwargs,
    ) -> None:
        super().__init__(**kwargs)
        if not gold_tokens:
            raise ValueError("oracle needs at least one gold word")
        self.gold = list(gold_tokens)
        self.duration = clip_duration_s
        self.noise = noise
        self._rng = random.Random(noise.seed)
        self._substituted: dict[int, str] = {}
        self._max_seen = -1
        self.call_index = 0

    def _midpoint(self, j: int) -> float:
        return (j + 0.5) * self.duration / len(self.gold)

    def _decode(self, segment: AudioChunk, final: bool) -> str:
        self.call_index += 1
        start_s = segment.start_sample / segment.sample_rate
        end_s = segment.end_sample / segment.sample_rate
        indices = [
            j for j in range(len(self.gold)) if start_s <= self._midpoint(j) < end_s
        ]
        tokens = []
        for j in indices:
            if j not in self._substituted:
                word = self.gold[j]
                if self._rng.random() < self.noise.substitution_p:
                    word = mangle(word)
                self._substituted[j] = word
            tokens.append(self._substituted[j])
        if indices and indices[-1] > self._max_seen:
            self._max_seen = indices[-1]
            if self._rng.random() < self.noise.instability_p:
                # temporary corruption; the next call emits the true form,
                # which downstream diffing turns into a revoke + add
                tokens[-1] = mangle(tokens[-1])
        return " ".join(tokens)

    def reset(self) -> None:
        self._rng = random.Random(self.noise.seed)
        self._substituted.clear()
        self._max_seen = -1
        self.call_index = 0
