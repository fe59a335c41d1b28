"""Exception taxonomy for the harness.

Every failure mode callers are expected to handle has its own class so
tests and downstream tooling can match on type rather than message text.
"""


class BenchError(Exception):
    """Base class for all harness errors."""


# -- audio ------------------------------------------------------------------

class AudioError(BenchError):
    pass


class NotWav(AudioError):
    """File is not a parseable RIFF/WAVE container."""


class UnsupportedEncoding(AudioError):
    """WAV payload is not 16-bit integer PCM."""


class MultiChannel(AudioError):
    """More than one channel; stereo is rejected, never downmixed."""


class EmptyAudio(AudioError):
    """Zero samples of audio."""


class InvalidChunkSize(AudioError):
    """Chunk length does not yield at least one sample."""


class MixedSampleRate(AudioError):
    """Chunks from different sample rates cannot be combined."""


class EmptySequence(AudioError):
    """No chunks given where at least one is required."""


# -- incremental units ------------------------------------------------------

class InconsistentEdit(BenchError):
    """Edit sequence does not apply cleanly (revoke not at the live tail)."""


class InvalidFraction(BenchError):
    """Trim fraction outside (0, 1)."""


# -- recognizer backends ----------------------------------------------------

class BackendError(BenchError):
    pass


class BackendUnavailable(BackendError):
    """Backend cannot be reached or did not answer in time."""


class DecodeFailure(BackendError):
    """Backend reported an error while decoding a segment."""


class SampleRateMismatch(BackendError):
    """Segment sample rate differs from the rate the backend was set up at."""


class MalformedLine(BackendError):
    """Wire line is not a valid protocol message."""


class UnknownType(BackendError):
    """Protocol message has an unrecognized type tag."""


class BadBase64(BackendError):
    """Audio payload is not valid base64."""


class HandshakeTimeout(BackendError):
    """Adapter did not complete the init/ready handshake in time."""


class SequenceMismatch(BackendError):
    """Adapter answered with a hypothesis for the wrong sequence number."""


class AdapterCrashed(BackendError):
    """Adapter process or connection died mid-session."""


# -- metrics ----------------------------------------------------------------

class MetricError(BenchError):
    pass


class EmptyReference(MetricError):
    """WER needs a non-empty reference transcript."""


class NoWordsRecognized(MetricError):
    """Latency is undefined when every hypothesis is empty."""


class NoEdits(MetricError):
    """Edit overhead is undefined without any add or revoke."""


class ZeroTime(MetricError):
    """Revoke rate is undefined without elapsed processing time."""


# -- harness ----------------------------------------------------------------

class MalformedManifest(BenchError):
    """Manifest file or directory layout cannot be parsed."""


class MissingAudio(BenchError):
    """Manifest entry points at an audio file that does not exist."""


class AllSessionsFailed(BenchError):
    """Every session in a dataset run ended in an error."""


class SchemaMismatch(BenchError):
    """Session log has an unsupported version or inconsistent content."""


class ConfigMismatch(BenchError):
    """Session logs from different configurations refuse to aggregate."""
