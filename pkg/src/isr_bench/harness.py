"""Dataset orchestration: manifests, session runs, and session logs.

A session streams one clip's chunks through a strategy and a recognizer and
records everything needed to recompute any metric offline: the hypotheses
with their timestamps and the full edit-event timeline. Logs serialize to
JSON lines so third parties can re-derive alternative metric definitions
without rerunning audio.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .audio import chunk as chunk_clip
from .audio import load_wav
from .backends import create_recognizer
from .backends.base import Hypothesis
from .clocks import Clock, MockClock, RealClock
from .errors import (
    AllSessionsFailed,
    BenchError,
    ConfigMismatch,
    MalformedManifest,
    MetricError,
    MissingAudio,
    SchemaMismatch,
)
from .iu import EditCounts, EditEvent, EditOp, IuState, WordIU
from .metrics import MetricsReport, aggregate_reports, compute_report
from .strategies import Lexicon, WindowConfig, build_session

LOG_VERSION = 1

_JSON_KW = {"sort_keys": True, "separators": (",", ":")}


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    clip_path: Path
    transcript: str


@dataclass(frozen=True)
class RunConfig:
    """Everything that shapes a run's results.

    Execution knobs that cannot change the measured values (worker count,
    output paths, render format) are deliberately kept out so that logs and
    reports are byte-identical across parallelism degrees.
    """

    strategy: str = "concatenation"
    chunk_ms: int = 1200
    min_words: int = 5
    max_window_s: float = 30.0
    trim_fraction: float = 0.35
    lexicon_path: str | None = None
    backend: str = "oracle"
    script_path: str | None = None
    instability_p: float = 0.0
    substitution_p: float = 0.0
    decode_s: float = 0.05
    timeout_s: float = 10.0
    seed: int = 0
    clock: str = "real"

    def validate(self) -> list[str]:
        problems = []
        if self.strategy not in ("concatenation", "sliding_window"):
            problems.append(f"unknown strategy {self.strategy!r}")
        if self.strategy == "sliding_window" and not self.lexicon_path:
            problems.append("sliding_window strategy requires --lexicon")
        if self.chunk_ms <= 0:
            problems.append(f"chunk_ms must be positive, got {self.chunk_ms}")
        if self.min_words < 1:
            problems.append(f"min_words must be >= 1, got {self.min_words}")
        if self.max_window_s <= 0:
            problems.append(f"max_window_s must be positive, got {self.max_window_s}")
        if not 0.0 < self.trim_fraction < 1.0:
            problems.append(f"trim_fraction must be in (0, 1), got {self.trim_fraction}")
        for name in ("instability_p", "substitution_p"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                problems.append(f"{name} must be in [0, 1], got {p}")
        if self.backend == "replay" and not self.script_path:
            problems.append("replay backend requires --script")
        if self.decode_s < 0:
            problems.append(f"decode_s must be >= 0, got {self.decode_s}")
        if self.timeout_s <= 0:
            problems.append(f"timeout_s must be positive, got {self.timeout_s}")
        if self.clock not in ("real", "mock"):
            problems.append(f"clock must be real or mock, got {self.clock!r}")
        return problems

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "chunk_ms": self.chunk_ms,
            "min_words": self.min_words,
            "max_window_s": self.max_window_s,
            "trim_fraction": self.trim_fraction,
            "lexicon_path": self.lexicon_path,
            "backend": self.backend,
            "script_path": self.script_path,
            "instability_p": self.instability_p,
            "substitution_p": self.substitution_p,
            "decode_s": self.decode_s,
            "timeout_s": self.timeout_s,
            "seed": self.seed,
            "clock": self.clock,
        }

    def fingerprint(self) -> str:
        digest = hashlib.sha256(json.dumps(self.to_dict(), **_JSON_KW).encode())
        return digest.hexdigest()[:12]


# -- session logs -------------------------------------------------------------


@dataclass
class SessionLog:
    """Complete record of one clip's evaluation."""

    entry_id: str
    seed: int
    config_fingerprint: str
    config: dict
    gold: str
    hypotheses: list[Hypothesis] = field(default_factory=list)
    events: list[EditEvent] = field(default_factory=list)
    time_s: float = 0.0
    wall_s: float = 0.0
    error: str | None = None
    version: int = LOG_VERSION

    @property
    def counts(self) -> EditCounts:
        return EditCounts.from_events(self.events)

    def final_transcript(self) -> list[str]:
        """Committed words in commit order."""
        return [ev.iu.text for ev in self.events if ev.op is EditOp.COMMIT]

    def live_replay(self) -> list[str]:
        """Replay the event stream to the surviving word sequence."""
        words: list[str] = []
        for ev in self.events:
            if ev.op is EditOp.ADD:
                words.append(ev.iu.text)
            elif ev.op is EditOp.REVOKE:
                if not words or words[-1] != ev.iu.text:
                    raise SchemaMismatch(
                        f"{self.entry_id}: revoke of {ev.iu.text!r} not at the live tail"
                    )
                words.pop()
        return words

    def to_lines(self) -> list[str]:
        head = {
            "type": "session_start",
            "version": self.version,
            "entry_id": self.entry_id,
            "seed": self.seed,
            "config_fingerprint": self.config_fingerprint,
            "config": self.config,
            "gold": self.gold,
        }
        lines = [json.dumps(head, **_JSON_KW)]
        for i, hyp in enumerate(self.hypotheses):
            row = {
                "type": "hypothesis",
                "idx": i,
                "raw_text": hyp.raw_text,
                "t_submit": hyp.t_submit,
                "t_receive": hyp.t_receive,
                "final": hyp.final,
            }
            if hyp.decode_s is not None:
                row["decode_s"] = hyp.decode_s
            lines.append(json.dumps(row, **_JSON_KW))
        for ev in self.events:
            lines.append(
                json.dumps(
                    {
                        "type": "event",
                        "op": ev.op.value,
                        "iu_id": ev.iu.id,
                        "text": ev.iu.text,
                        "wall_time": ev.wall_time,
                        "origin": ev.iu.origin,
                    },
                    **_JSON_KW,
                )
            )
        counts = self.counts
        lines.append(
            json.dumps(
                {
                    "type": "session_end",
                    "counts": {
                        "adds": counts.adds,
                        "revokes": counts.revokes,
                        "commits": counts.commits,
                    },
                    "time_s": self.time_s,
                    "wall_s": self.wall_s,
                    "error": self.error,
                },
                **_JSON_KW,
            )
        )
        return lines

    def to_text(self) -> str:
        return "\n".join(self.to_lines()) + "\n"


def _parse_log_line(line: str, lineno: int) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"line {lineno}: not valid JSON ({exc})") from exc
    if not isinstance(obj, dict) or "type" not in obj:
        raise SchemaMismatch(f"line {lineno}: not a log record")
    return obj


def read_session_logs(source: str | Path | Iterable[str]) -> list[SessionLog]:
    """Parse one or more serialized sessions from a JSON-lines stream."""
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = [ln.rstrip("\n") for ln in source]

    logs: list[SessionLog] = []
    current: SessionLog | None = None
    words: dict[int, WordIU] = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        obj = _parse_log_line(line, lineno)
        kind = obj["type"]
        if kind == "session_start":
            if current is not None:
                raise SchemaMismatch(f"line {lineno}: session_start inside open session")
            if obj.get("version") != LOG_VERSION:
                raise SchemaMismatch(
                    f"line {lineno}: log version {obj.get('version')!r}, "
                    f"supported {LOG_VERSION}"
                )
            try:
                current = SessionLog(
                    entry_id=obj["entry_id"],
                    seed=obj["seed"],
                    config_fingerprint=obj["config_fingerprint"],
                    config=obj["config"],
                    gold=obj["gold"],
                )
            except KeyError as exc:
                raise SchemaMismatch(f"line {lineno}: missing field {exc}") from exc
            words = {}
        elif current is None:
            raise SchemaMismatch(f"line {lineno}: {kind} record outside a session")
        elif kind == "hypothesis":
            try:
                current.hypotheses.append(
                    Hypothesis(
                        raw_text=obj["raw_text"],
                        t_submit=obj["t_submit"],
                        t_receive=obj["t_receive"],
                        final=obj["final"],
                        decode_s=obj.get("decode_s"),
                    )
                )
            except (KeyError, ValueError) as exc:
                raise SchemaMismatch(f"line {lineno}: bad hypothesis ({exc})") from exc
        elif kind == "event":
            try:
                op = EditOp(obj["op"])
                iu_id = obj["iu_id"]
                if op is EditOp.ADD:
                    if iu_id in words:
                        raise SchemaMismatch(f"line {lineno}: duplicate add of iu {iu_id}")
                    words[iu_id] = WordIU(
                        iu_id, obj["text"], origin=obj.get("origin", -1)
                    )
                else:
                    if iu_id not in words:
                        raise SchemaMismatch(
                            f"line {lineno}: {op.value} of unknown iu {iu_id}"
                        )
                    if op is EditOp.REVOKE:
                        words[iu_id].revoke()
                    else:
                        words[iu_id].commit()
                current.events.append(EditEvent(op, words[iu_id], obj["wall_time"]))
            except (KeyError, ValueError) as exc:
                raise SchemaMismatch(f"line {lineno}: bad event ({exc})") from exc
        elif kind == "session_end":
            counts = current.counts
            stored = obj.get("counts", {})
            if (counts.adds, counts.revokes, counts.commits) != (
                stored.get("adds"),
                stored.get("revokes"),
                stored.get("commits"),
            ):
                raise SchemaMismatch(
                    f"line {lineno}: stored counts {stored} disagree with event tally"
                )
            current.time_s = obj["time_s"]
            current.wall_s = obj["wall_s"]
            current.error = obj.get("error")
            logs.append(current)
            current = None
        else:
            raise SchemaMismatch(f"line {lineno}: unknown record type {kind!r}")
    if current is not None:
        raise SchemaMismatch(f"log truncated: session {current.entry_id!r} never ended")
    if not logs:
        raise SchemaMismatch("no sessions found in log")
    return logs


# -- manifests ----------------------------------------------------------------


def _manifest_from_jsonl(path: Path) -> list[ManifestEntry]:
    from .iu import normalize_tokens

    entries = []
    seen = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedManifest(f"{path}: line {lineno}: not valid JSON ({exc})") from exc
        if not isinstance(obj, dict):
            raise MalformedManifest(f"{path}: line {lineno}: expected an object")
        missing = [k for k in ("id", "audio", "text") if k not in obj]
        if missing:
            raise MalformedManifest(
                f"{path}: line {lineno}: missing field(s) {', '.join(missing)}"
            )
        entry_id = str(obj["id"])
        if entry_id in seen:
            raise MalformedManifest(f"{path}: line {lineno}: duplicate id {entry_id!r}")
        seen.add(entry_id)
        if not normalize_tokens(obj["text"]):
            raise MalformedManifest(
                f"{path}: line {lineno}: transcript is empty after normalization"
            )
        clip_path = Path(obj["audio"])
        if not clip_path.is_absolute():
            clip_path = path.parent / clip_path
        if not clip_path.exists():
            raise MissingAudio(f"{path}: line {lineno}: no such audio file {clip_path}")
        entries.append(ManifestEntry(id=entry_id, clip_path=clip_path, transcript=obj["text"]))
    if not entries:
        raise MalformedManifest(f"{path}: manifest holds no entries")
    return entries


def _manifest_from_directory(root: Path) -> list[ManifestEntry]:
    """Directory layout with per-chapter *.trans.txt transcript indexes.

    Each line is "<utterance-id> <transcript>"; audio is expected next to
    the index as <utterance-id>.wav (compressed originals must be converted
    to WAV first).
    """
    from .iu import normalize_tokens

    trans_files = sorted(root.rglob("*.trans.txt"))
    if not trans_files:
        raise MalformedManifest(f"{root}: no *.trans.txt files found")
    entries = []
    seen = set()
    for trans in trans_files:
        for lineno, line in enumerate(trans.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            utt_id, _, text = line.partition(" ")
            if not utt_id or not normalize_tokens(text):
                raise MalformedManifest(f"{trans}: line {lineno}: bad transcript line")
            if utt_id in seen:
                raise MalformedManifest(f"{trans}: line {lineno}: duplicate id {utt_id!r}")
            seen.add(utt_id)
            wav = trans.parent / f"{utt_id}.wav"
            if not wav.exists():
                flac = trans.parent / f"{utt_id}.flac"
                hint = " (found .flac; convert to WAV first)" if flac.exists() else ""
                raise MissingAudio(f"{trans}: line {lineno}: no such file {wav}{hint}")
            entries.append(ManifestEntry(id=utt_id, clip_path=wav, transcript=text.strip()))
    return entries


def load_manifest(path: str | Path) -> list[ManifestEntry]:
    """Load a JSON-lines manifest, or scan a transcript-index directory."""
    path = Path(path)
    if path.is_dir():
        return _manifest_from_directory(path)
    if not path.exists():
        raise MalformedManifest(f"no such manifest: {path}")
    return _manifest_from_jsonl(path)


# -- session + dataset runners -------------------------------------------------


def _make_clock(kind: str) -> Clock:
    return MockClock() if kind == "mock" else RealClock()


def run_session(entry: ManifestEntry, config: RunConfig, session_seed: int) -> SessionLog:
    """Stream one clip through the configured strategy and backend.

    Any harness-level error (bad audio, backend failure) is recorded on the
    log rather than raised, so one bad clip cannot take down a dataset run.
    """
    from .iu import normalize_tokens

    log = SessionLog(
        entry_id=entry.id,
        seed=session_seed,
        config_fingerprint=config.fingerprint(),
        config=config.to_dict(),
        gold=entry.transcript,
    )
    clock = _make_clock(config.clock)
    recognizer = None
    try:
        clip = load_wav(entry.clip_path)
        chunks = chunk_clip(clip, config.chunk_ms)
        recognizer = create_recognizer(
            config.backend,
            sample_rate=clip.sample_rate,
            gold_tokens=normalize_tokens(entry.transcript),
            clip_duration_s=clip.duration_seconds,
            seed=session_seed,
            instability_p=config.instability_p,
            substitution_p=config.substitution_p,
            decode_s=config.decode_s,
            script_path=config.script_path,
            timeout_s=config.timeout_s,
        )
        lexicon = Lexicon.load(config.lexicon_path) if config.lexicon_path else None
        session = build_session(
            config.strategy,
            recognizer,
            clock,
            lexicon=lexicon,
            window_config=WindowConfig(
                min_words=config.min_words,
                max_window_s=config.max_window_s,
                trim_fraction=config.trim_fraction,
            ),
        )
        t_start = clock.now()
        chunk_s = config.chunk_ms / 1000.0
        for piece in chunks:
            if isinstance(clock, MockClock):
                # simulate live arrival: chunk k is available once its
                # audio has actually elapsed
                clock.advance_to(t_start + (piece.index + 1) * chunk_s)
            session.step(piece)
        session.finalize()
        log.hypotheses = list(session.hypotheses)
        log.events = list(session.tracker.events)
        log.time_s = sum(h.elapsed for h in log.hypotheses)
        log.wall_s = clock.now() - t_start
    except BenchError as exc:
        log.error = f"{type(exc).__name__}: {exc}"
    finally:
        if recognizer is not None:
            recognizer.close()
    return log


@dataclass
class DatasetResult:
    logs: list[SessionLog]
    reports: list[MetricsReport]
    aggregate: MetricsReport
    failed: list[tuple[str, str]]

    @property
    def all_reports(self) -> list[MetricsReport]:
        return self.reports + [self.aggregate]


def reports_from_logs(logs: Sequence[SessionLog]) -> DatasetResult:
    """Recompute per-session and aggregate reports from stored logs."""
    fingerprints = {log.config_fingerprint for log in logs}
    if len(fingerprints) > 1:
        raise ConfigMismatch(
            f"logs from different configurations cannot aggregate: {sorted(fingerprints)}"
        )
    reports: list[MetricsReport] = []
    failed: list[tuple[str, str]] = []
    for log in logs:
        if log.error is not None:
            failed.append((log.entry_id, log.error))
            continue
        try:
            reports.append(compute_report(log))
        except MetricError as exc:
            failed.append((log.entry_id, f"{type(exc).__name__}: {exc}"))
    if not reports:
        raise AllSessionsFailed(
            "; ".join(f"{entry_id}: {err}" for entry_id, err in failed) or "no sessions"
        )
    return DatasetResult(
        logs=list(logs),
        reports=reports,
        aggregate=aggregate_reports(reports),
        failed=failed,
    )


def run_dataset(
    entries: Sequence[ManifestEntry], config: RunConfig, workers: int = 1
) -> DatasetResult:
    """Run every manifest entry; sessions are independent and may run in
    parallel, each owning its backend connection, clock, and seed."""
    if not entries:
        raise MalformedManifest("manifest holds no entries")
    seeds = [config.seed + i for i in range(len(entries))]
    if workers <= 1:
        logs = [run_session(e, config, s) for e, s in zip(entries, seeds)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            logs = list(pool.map(run_session, entries, [config] * len(entries), seeds))
    return reports_from_logs(logs)
