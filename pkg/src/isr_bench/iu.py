"""Word-level incremental units and hypothesis diffing.

A recognizer's successive hypotheses are turned into a stream of edit
events over word units: add (a new word appeared), revoke (a previously
emitted word was retracted), commit (a word became final). The diff rule
is longest-common-prefix: everything after the first divergence is revoked
newest-first, then the replacement words are added in order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

from .errors import InconsistentEdit


class IuState(str, Enum):
    ADDED = "added"
    REVOKED = "revoked"
    COMMITTED = "committed"


class EditOp(str, Enum):
    ADD = "add"
    REVOKE = "revoke"
    COMMIT = "commit"


@dataclass
class WordIU:
    """One recognized word.

    id is monotonically increasing and unique within a session. origin is
    the index of the hypothesis that produced the word (-1 when unknown).
    State may only move added -> revoked or added -> committed; both are
    terminal.
    """

    id: int
    text: str
    state: IuState = IuState.ADDED
    origin: int = -1

    def __post_init__(self) -> None:
        if not self.text or any(ch.isspace() for ch in self.text):
            raise ValueError(f"word text must be non-empty without whitespace: {self.text!r}")

    def revoke(self) -> None:
        if self.state is not IuState.ADDED:
            raise InconsistentEdit(f"cannot revoke {self.state.value} word {self.text!r}")
        self.state = IuState.REVOKED

    def commit(self) -> None:
        if self.state is not IuState.ADDED:
            raise InconsistentEdit(f"cannot commit {self.state.value} word {self.text!r}")
        self.state = IuState.COMMITTED


@dataclass(frozen=True)
class EditEvent:
    op: EditOp
    iu: WordIU
    wall_time: float


@dataclass
class EditCounts:
    """Tallies of edit operations; edits = adds + revokes (commits excluded)."""

    adds: int = 0
    revokes: int = 0
    commits: int = 0

    @property
    def edits(self) -> int:
        return self.adds + self.revokes

    def __add__(self, other: "EditCounts") -> "EditCounts":
        return EditCounts(
            adds=self.adds + other.adds,
            revokes=self.revokes + other.revokes,
            commits=self.commits + other.commits,
        )

    @classmethod
    def from_events(cls, events: Sequence[EditEvent]) -> "EditCounts":
        counts = cls()
        for ev in events:
            if ev.op is EditOp.ADD:
                counts.adds += 1
            elif ev.op is EditOp.REVOKE:
                counts.revokes += 1
            else:
                counts.commits += 1
        return counts


def normalize_tokens(text: str) -> list[str]:
    """Split raw recognizer output into comparable tokens.

    Lowercase, strip punctuation except internal apostrophes, split on
    whitespace, drop empty leftovers.
    """
    tokens = []
    for raw in text.lower().split():
        cleaned = "".join(ch for ch in raw if ch.isalnum() or ch == "'").strip("'")
        if cleaned:
            tokens.append(cleaned)
    return tokens


def common_prefix_len(a: Sequence[str], b: Sequence[str]) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def diff_hypotheses(
    live: Sequence[WordIU],
    new_tokens: Sequence[str],
    wall_time: float,
    ids: Iterator[int],
    origin: int = -1,
) -> tuple[list[EditEvent], list[WordIU]]:
    """Diff the live word sequence against a new hypothesis.

    Words past the longest common prefix are revoked newest-first, then the
    new suffix is added in order. Returns the events and the new live list.
    """
    prefix = common_prefix_len([iu.text for iu in live], new_tokens)
    events: list[EditEvent] = []
    for iu in reversed(live[prefix:]):
        iu.revoke()
        events.append(EditEvent(EditOp.REVOKE, iu, wall_time))
    kept = list(live[:prefix])
    for token in new_tokens[prefix:]:
        iu = WordIU(next(ids), token, origin=origin)
        kept.append(iu)
        events.append(EditEvent(EditOp.ADD, iu, wall_time))
    return events, kept


def apply_edits(prev: Sequence[str], edits: Sequence[EditEvent]) -> list[str]:
    """Apply edit events to a token sequence (inverse of diff_hypotheses).

    Revokes must strip from the live tail; anything else raises
    InconsistentEdit. Commits do not change the sequence.
    """
    out = list(prev)
    for ev in edits:
        if ev.op is EditOp.REVOKE:
            if not out or out[-1] != ev.iu.text:
                raise InconsistentEdit(
                    f"revoke of {ev.iu.text!r} does not match live tail {out[-1:]!r}"
                )
            out.pop()
        elif ev.op is EditOp.ADD:
            out.append(ev.iu.text)
    return out


def commit_remaining(live: Sequence[WordIU], wall_time: float) -> list[EditEvent]:
    """Commit every live word, in order."""
    events = []
    for iu in live:
        iu.commit()
        events.append(EditEvent(EditOp.COMMIT, iu, wall_time))
    return events


class TranscriptTracker:
    """Single-session owner of word ids, the live tail, and committed words.

    All mutations go through this class so that event order, id order, and
    state transitions stay consistent; the final transcript is the committed
    words in commit order.
    """

    def __init__(self) -> None:
        self._ids = itertools.count()
        self.live: list[WordIU] = []
        self.committed: list[WordIU] = []
        self.events: list[EditEvent] = []

    @property
    def live_tokens(self) -> list[str]:
        return [iu.text for iu in self.live]

    @property
    def committed_tokens(self) -> list[str]:
        return [iu.text for iu in self.committed]

    @property
    def counts(self) -> EditCounts:
        return EditCounts.from_events(self.events)

    def update(self, new_tokens: Sequence[str], wall_time: float, origin: int = -1) -> list[EditEvent]:
        """Prefix-diff the live tail against a new hypothesis."""
        events, self.live = diff_hypotheses(self.live, new_tokens, wall_time, self._ids, origin)
        self.events.extend(events)
        return events

    def add_words(self, tokens: Sequence[str], wall_time: float, origin: int = -1) -> list[EditEvent]:
        """Append new words without diffing."""
        events = []
        for token in tokens:
            iu = WordIU(next(self._ids), token, origin=origin)
            self.live.append(iu)
            events.append(EditEvent(EditOp.ADD, iu, wall_time))
        self.events.extend(events)
        return events

    def revoke_last(self, wall_time: float) -> EditEvent:
        iu = self.live.pop()
        iu.revoke()
        event = EditEvent(EditOp.REVOKE, iu, wall_time)
        self.events.append(event)
        return event

    def commit_first(self, count: int, wall_time: float) -> list[EditEvent]:
        """Commit the first `count` live words (they leave the revisable tail)."""
        if count <= 0:
            return []
        leaving, self.live = self.live[:count], self.live[count:]
        events = []
        for iu in leaving:
            iu.commit()
            self.committed.append(iu)
            events.append(EditEvent(EditOp.COMMIT, iu, wall_time))
        self.events.extend(events)
        return events

    def commit_all(self, wall_time: float) -> list[EditEvent]:
        return self.commit_first(len(self.live), wall_time)
