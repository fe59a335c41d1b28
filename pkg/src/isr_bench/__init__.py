"""Benchmark harness for incremental speech recognition.

Streams audio into pluggable recognizer backends with either a sliding
window or full-prefix concatenation, converts successive hypotheses into
add/revoke/commit edit events, and reports WER, latency, edit overhead,
revokes per second, and seconds per revoke.
"""

from .audio import AudioChunk, AudioClip, chunk, concat, load_wav
from .backends import (
    Hypothesis,
    NoiseModel,
    OracleRecognizer,
    Recognizer,
    ReplayRecognizer,
    create_recognizer,
)
from .clocks import Clock, MockClock, RealClock
from .harness import (
    ManifestEntry,
    RunConfig,
    SessionLog,
    load_manifest,
    read_session_logs,
    reports_from_logs,
    run_dataset,
    run_session,
)
from .iu import (
    EditCounts,
    EditEvent,
    EditOp,
    IuState,
    TranscriptTracker,
    WordIU,
    apply_edits,
    commit_remaining,
    diff_hypotheses,
    normalize_tokens,
)
from .metrics import (
    MetricsReport,
    aggregate_reports,
    compute_report,
    edit_overhead,
    latency,
    pooled_latency,
    revokes_per_second,
    seconds_per_revoke,
    wer,
)
from .report import emit_report
from .strategies import (
    ConcatenationSession,
    Lexicon,
    SlidingWindowSession,
    WindowConfig,
    build_session,
    join_overlap,
    trim_window,
)

__version__ = "0.1.0"
