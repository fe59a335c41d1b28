"""Session metrics: WER, latency, edit overhead, and revoke rates.

Latency is the mean over predictions of (receive - submit) / words-in-that-
prediction; a pooled total-time / total-words variant is carried alongside
as a diagnostic. Edit overhead is revokes / (adds + revokes). Revokes per
second divides revokes by cumulative recognition time, and seconds per
revoke is its reciprocal, with infinity marking sessions that never revoke.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

from .errors import EmptyReference, NoEdits, NoWordsRecognized, ZeroTime
from .iu import EditCounts, normalize_tokens

if TYPE_CHECKING:
    from .backends.base import Hypothesis
    from .harness import SessionLog

INF = math.inf


@dataclass(frozen=True)
class WerResult:
    rate: float
    substitutions: int
    deletions: int
    insertions: int

    @property
    def distance(self) -> int:
        return self.substitutions + self.deletions + self.insertions


def wer(ref: Sequence[str], hyp: Sequence[str]) -> WerResult:
    """Word error rate from a minimum edit-distance alignment, unit costs.

    Returns the rate (S + D + I) / |ref| together with the operation counts
    from one optimal alignment (ties broken match > substitution > deletion
    > insertion during backtrace).
    """
    if not ref:
        raise EmptyReference("WER needs a non-empty reference")
    n, m = len(ref), len(hyp)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dp[i][0] = i
    for j in range(1, m + 1):
        dp[0][j] = j
    for i in range(1, n + 1):
        row, prev = dp[i], dp[i - 1]
        for j in range(1, m + 1):
            sub = prev[j - 1] + (ref[i - 1] != hyp[j - 1])
            row[j] = min(sub, prev[j] + 1, row[j - 1] + 1)

    subs = dels = ins = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] and ref[i - 1] == hyp[j - 1]:
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] + 1:
            subs += 1
            i, j = i - 1, j - 1
        elif i > 0 and dp[i][j] == dp[i - 1][j] + 1:
            dels += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return WerResult(rate=dp[n][m] / n, substitutions=subs, deletions=dels, insertions=ins)


def latency(hypotheses: Sequence["Hypothesis"]) -> float:
    """Mean seconds per word across predictions; empty predictions excluded."""
    ratios = [h.elapsed / h.n_words for h in hypotheses if h.n_words > 0]
    if not ratios:
        raise NoWordsRecognized("no hypothesis carried any words")
    return sum(ratios) / len(ratios)


def pooled_latency(hypotheses: Sequence["Hypothesis"]) -> float:
    """Diagnostic variant: total elapsed time over total words."""
    total_words = sum(h.n_words for h in hypotheses)
    if total_words == 0:
        raise NoWordsRecognized("no hypothesis carried any words")
    return sum(h.elapsed for h in hypotheses) / total_words


def edit_overhead(counts: EditCounts) -> float:
    """Revokes / (adds + revokes); commits are not edits."""
    if counts.edits == 0:
        raise NoEdits("no adds or revokes to measure")
    return counts.revokes / counts.edits


def revokes_per_second(revokes: int, time_s: float) -> float:
    if time_s <= 0:
        raise ZeroTime(f"processing time must be positive, got {time_s}")
    return revokes / time_s


def seconds_per_revoke(rps: float) -> float:
    """Reciprocal of the revoke rate; infinity means zero revokes."""
    if rps < 0:
        raise ValueError(f"revoke rate cannot be negative: {rps}")
    if rps == 0:
        return INF
    return 1.0 / rps


COUNT_FIELDS = (
    "adds",
    "revokes",
    "commits",
    "words",
    "timed_hypotheses",
    "substitutions",
    "deletions",
    "insertions",
    "ref_words",
)


@dataclass(frozen=True)
class MetricsReport:
    """All metrics for one session, or micro-averaged over many.

    counts carries the raw tallies the rates were computed from, so pooled
    aggregation and alternative metric definitions stay possible.
    """

    entry_id: str
    wer: float
    lat_s_per_word: float
    lat_pooled: float
    eo: float
    rps: float
    spr: float
    time_s: float
    wall_s: float
    counts: dict[str, int] = field(default_factory=dict)
    lat_ratio_sum: float = 0.0  # sum of per-hypothesis elapsed/words, for pooling

    def count(self, name: str) -> int:
        return self.counts.get(name, 0)


def compute_report(log: "SessionLog", gold_tokens: Sequence[str] | None = None) -> MetricsReport:
    """Derive every metric from a finalized session log.

    WER is scored on the committed transcript against the normalized gold
    transcript; stability metrics come from the event tallies; time is the
    cumulative recognition time (sum of per-hypothesis elapsed).
    """
    if log.error is not None:
        raise ValueError(f"session {log.entry_id} failed: {log.error}")
    ref = list(gold_tokens) if gold_tokens is not None else normalize_tokens(log.gold)
    if not ref:
        raise EmptyReference(f"session {log.entry_id} has an empty gold transcript")
    transcript = log.final_transcript()
    wer_result = wer(ref, transcript)
    counts = log.counts
    lat = latency(log.hypotheses)
    lat_pool = pooled_latency(log.hypotheses)
    eo = edit_overhead(counts)
    rps = revokes_per_second(counts.revokes, log.time_s)
    timed = [h for h in log.hypotheses if h.n_words > 0]
    return MetricsReport(
        entry_id=log.entry_id,
        wer=wer_result.rate,
        lat_s_per_word=lat,
        lat_pooled=lat_pool,
        eo=eo,
        rps=rps,
        spr=seconds_per_revoke(rps),
        time_s=log.time_s,
        wall_s=log.wall_s,
        counts={
            "adds": counts.adds,
            "revokes": counts.revokes,
            "commits": counts.commits,
            "words": sum(h.n_words for h in log.hypotheses),
            "timed_hypotheses": len(timed),
            "substitutions": wer_result.substitutions,
            "deletions": wer_result.deletions,
            "insertions": wer_result.insertions,
            "ref_words": len(ref),
        },
        lat_ratio_sum=sum(h.elapsed / h.n_words for h in timed),
    )


def aggregate_reports(reports: Sequence[MetricsReport]) -> MetricsReport:
    """Micro-average: pool raw counts across sessions, then apply formulas."""
    if not reports:
        raise ValueError("nothing to aggregate")
    totals = {name: sum(r.count(name) for r in reports) for name in COUNT_FIELDS}
    time_s = sum(r.time_s for r in reports)
    wall_s = sum(r.wall_s for r in reports)
    lat_ratio_sum = sum(r.lat_ratio_sum for r in reports)
    counts = EditCounts(
        adds=totals["adds"], revokes=totals["revokes"], commits=totals["commits"]
    )
    if totals["ref_words"] == 0:
        raise EmptyReference("aggregate has an empty pooled reference")
    if totals["timed_hypotheses"] == 0:
        raise NoWordsRecognized("aggregate has no words")
    distance = totals["substitutions"] + totals["deletions"] + totals["insertions"]
    rps = revokes_per_second(counts.revokes, time_s)
    return MetricsReport(
        entry_id="aggregate",
        wer=distance / totals["ref_words"],
        lat_s_per_word=lat_ratio_sum / totals["timed_hypotheses"],
        lat_pooled=time_s / totals["words"],
        eo=edit_overhead(counts),
        rps=rps,
        spr=seconds_per_revoke(rps),
        time_s=time_s,
        wall_s=wall_s,
        counts=totals,
        lat_ratio_sum=lat_ratio_sum,
    )
