"""The two streaming strategies: sliding window and concatenation.

Concatenation feeds the recognizer the entire audio prefix every step, so
successive hypotheses cover the same span and a plain prefix diff converts
them to edits. The sliding window keeps only a bounded buffer: once a
window matures (enough predicted words, or the size cap), the oldest part
of the buffer is dropped and the words attributed to it are committed.
Because the next hypothesis then starts mid-stream, it is joined onto the
accumulated transcript by suffix/prefix overlap, with a lexicon lookup to
repair words split at a window boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import audio
from .audio import AudioChunk
from .backends.base import Hypothesis, Recognizer
from .clocks import Clock
from .errors import InvalidFraction
from .iu import EditEvent, TranscriptTracker, normalize_tokens


@dataclass(frozen=True)
class Lexicon:
    """Set of known words used to repair fragments at window boundaries."""

    words: frozenset[str]

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "Lexicon":
        normalized = set()
        for word in words:
            normalized.update(normalize_tokens(word))
        return cls(frozenset(normalized))

    @classmethod
    def load(cls, path: str | Path) -> "Lexicon":
        return cls.from_words(Path(path).read_text(encoding="utf-8").splitlines())

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class WindowConfig:
    """Sliding-window maturity and trim parameters."""

    min_words: int = 5
    max_window_s: float = 30.0
    trim_fraction: float = 0.35

    def __post_init__(self) -> None:
        if self.min_words < 1:
            raise ValueError(f"min_words must be >= 1, got {self.min_words}")
        if self.max_window_s <= 0:
            raise ValueError(f"max_window_s must be positive, got {self.max_window_s}")
        if not 0.0 < self.trim_fraction < 1.0:
            raise InvalidFraction(
                f"trim_fraction must be in (0, 1), got {self.trim_fraction}"
            )


def trim_window(buffer: AudioChunk, trim_fraction: float) -> AudioChunk:
    """Drop the leading trim_fraction of a buffer.

    Drops floor(trim_fraction * samples) samples, resolving fractional
    samples toward keeping more audio.
    """
    if not 0.0 < trim_fraction < 1.0:
        raise InvalidFraction(f"trim_fraction must be in (0, 1), got {trim_fraction}")
    dropped = int(trim_fraction * buffer.sample_count)
    return AudioChunk(
        pcm=buffer.pcm[dropped * audio.BYTES_PER_SAMPLE :],
        sample_rate=buffer.sample_rate,
        index=buffer.index,
        start_sample=buffer.start_sample + dropped,
    )


def join_overlap(
    tail: Sequence[str], new_tokens: Sequence[str], lexicon: Lexicon | None
) -> tuple[int, str | None]:
    """Align a post-trim hypothesis onto the accumulated transcript tail.

    Returns (overlap_len, merge): overlap_len is the largest k such that the
    last k tail words equal the first k new words. When nothing overlaps but
    the last tail word and the first new word concatenate to a lexicon word
    while at least one of the fragments is itself unknown, that concatenation
    is returned as a merge (the caller revokes the fragment and adds the
    merged word).
    """
    limit = min(len(tail), len(new_tokens))
    for k in range(limit, 0, -1):
        if list(tail[-k:]) == list(new_tokens[:k]):
            return k, None
    if tail and new_tokens and lexicon is not None:
        left, right = tail[-1], new_tokens[0]
        joined = left + right
        if joined in lexicon and (left not in lexicon or right not in lexicon):
            return 0, joined
    return 0, None


class ConcatenationSession:
    """Recognize the ever-growing audio prefix each step; diff, no joining."""

    strategy_name = "concatenation"

    def __init__(self, recognizer: Recognizer, clock: Clock) -> None:
        self.recognizer = recognizer
        self.clock = clock
        self.tracker = TranscriptTracker()
        self.hypotheses: list[Hypothesis] = []
        self.buffer: AudioChunk | None = None
        self._step = 0

    def _absorb(self, hyp: Hypothesis) -> list[EditEvent]:
        self.hypotheses.append(hyp)
        events = self.tracker.update(list(hyp.tokens), hyp.t_receive, origin=self._step)
        self._step += 1
        return events

    def step(self, chunk: AudioChunk) -> list[EditEvent]:
        self.buffer = chunk if self.buffer is None else audio.concat([self.buffer, chunk])
        return self._absorb(self.recognizer.recognize(self.buffer, self.clock))

    def finalize(self) -> list[EditEvent]:
        events: list[EditEvent] = []
        if self.buffer is not None:
            events = self._absorb(self.recognizer.finish(self.buffer, self.clock))
        events += self.tracker.commit_all(self.clock.now())
        return events


class SlidingWindowSession:
    """Recognize a bounded, overlapping window; join predictions across trims.

    Invariant between steps: the live tail mirrors the current window's
    hypothesis from position hyp_skip onward (the first hyp_skip hypothesis
    words re-describe audio whose words are already committed). A trim
    breaks that correspondence, so the next hypothesis is re-anchored by
    join_overlap against the accumulated transcript instead of diffed.
    """

    strategy_name = "sliding_window"

    def __init__(
        self,
        recognizer: Recognizer,
        clock: Clock,
        lexicon: Lexicon,
        config: WindowConfig = WindowConfig(),
    ) -> None:
        self.recognizer = recognizer
        self.clock = clock
        self.lexicon = lexicon
        self.config = config
        self.tracker = TranscriptTracker()
        self.hypotheses: list[Hypothesis] = []
        self.buffer: AudioChunk | None = None
        self.hyp_skip = 0
        self.pending_join = False
        self.trim_log: list[tuple[int, int]] = []  # (samples before, after) per trim
        self._step = 0

    # -- hypothesis absorption ------------------------------------------

    def _absorb(self, hyp: Hypothesis) -> list[EditEvent]:
        self.hypotheses.append(hyp)
        tokens = list(hyp.tokens)
        t = hyp.t_receive
        if self.pending_join:
            events = self._join(tokens, t)
            self.pending_join = False
        else:
            events = self.tracker.update(tokens[self.hyp_skip :], t, origin=self._step)
        self._step += 1
        return events

    def _join(self, tokens: list[str], t: float) -> list[EditEvent]:
        live_len = len(self.tracker.live)
        context = self.tracker.committed_tokens + self.tracker.live_tokens
        overlap, merge = join_overlap(context, tokens, self.lexicon)
        events: list[EditEvent] = []
        if merge is not None and live_len > 0:
            # boundary fragments: revoke the dangling fragment, add the
            # repaired word, and seal it (the window cannot re-derive it)
            events += self.tracker.commit_first(live_len - 1, t)
            events.append(self.tracker.revoke_last(t))
            events += self.tracker.add_words([merge], t, origin=self._step)
            events += self.tracker.commit_first(1, t)
            events += self.tracker.add_words(tokens[1:], t, origin=self._step)
            self.hyp_skip = 1
            return events
        overlap_in_live = min(overlap, live_len)
        # live words before the overlap can never be re-derived from the
        # remaining window audio: they are final now
        events += self.tracker.commit_first(live_len - overlap_in_live, t)
        events += self.tracker.add_words(tokens[overlap:], t, origin=self._step)
        self.hyp_skip = overlap - overlap_in_live
        return events

    # -- trimming ---------------------------------------------------------

    def _should_trim(self, hyp: Hypothesis) -> bool:
        return (
            hyp.n_words >= self.config.min_words
            or self.buffer.duration_seconds >= self.config.max_window_s
        )

    def _trim(self, t: float) -> list[EditEvent]:
        before = self.buffer.sample_count
        self.buffer = trim_window(self.buffer, self.config.trim_fraction)
        self.trim_log.append((before, self.buffer.sample_count))
        # words are attributed to window audio proportionally by position:
        # live word i (of hyp_skip + L window words) sits at midpoint
        # (hyp_skip + i + 0.5) / total; those inside the dropped fraction
        # leave the window for good and are committed now
        live_len = len(self.tracker.live)
        total = self.hyp_skip + live_len
        commit_n = 0
        if total:
            for i in range(live_len):
                if (self.hyp_skip + i + 0.5) / total < self.config.trim_fraction:
                    commit_n += 1
                else:
                    break
        events = self.tracker.commit_first(commit_n, t)
        self.pending_join = True
        self.hyp_skip = 0
        return events

    # -- public driver ----------------------------------------------------

    def step(self, chunk: AudioChunk) -> list[EditEvent]:
        self.buffer = chunk if self.buffer is None else audio.concat([self.buffer, chunk])
        hyp = self.recognizer.recognize(self.buffer, self.clock)
        events = self._absorb(hyp)
        if self._should_trim(hyp):
            events += self._trim(hyp.t_receive)
        return events

    def finalize(self) -> list[EditEvent]:
        events: list[EditEvent] = []
        if self.buffer is not None:
            events = self._absorb(self.recognizer.finish(self.buffer, self.clock))
        events += self.tracker.commit_all(self.clock.now())
        return events


StrategySession = ConcatenationSession | SlidingWindowSession

STRATEGIES = ("concatenation", "sliding_window")


def build_session(
    strategy: str,
    recognizer: Recognizer,
    clock: Clock,
    *,
    lexicon: Lexicon | None = None,
    window_config: WindowConfig | None = None,
) -> StrategySession:
    if strategy == "concatenation":
        return ConcatenationSession(recognizer, clock)
    if strategy == "sliding_window":
        if lexicon is None or len(lexicon) == 0:
            raise ValueError("sliding_window strategy needs a non-empty lexicon")
        return SlidingWindowSession(
            recognizer, clock, lexicon, window_config or WindowConfig()
        )
    raise ValueError(f"unknown strategy {strategy!r}")
