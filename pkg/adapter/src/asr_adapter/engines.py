"""Speech engines behind one loader function.

An engine turns a PCM buffer into text in one blocking call. The adapter
buffers audio itself and decodes on request, so engines stay trivially
simple and the hypothesis always reflects exactly the submitted audio.
"""

from __future__ import annotations

from pathlib import Path


class EngineError(Exception):
    pass


class EchoEngine:
    """Ignores audio and replays a script, one line per decode.

    Lets integration suites exercise a real subprocess adapter without any
    model files. When the script runs out, the last line repeats; reset
    rewinds to the beginning (a new clip replays the script).
    """

    name = "echo"

    def __init__(self, script_path: str | Path) -> None:
        lines = Path(script_path).read_text(encoding="utf-8").splitlines()
        if not lines:
            raise EngineError(f"echo script {script_path} is empty")
        self.lines = lines
        self.cursor = 0

    def decode(self, pcm: bytes, sample_rate: int) -> str:
        text = self.lines[min(self.cursor, len(self.lines) - 1)]
        self.cursor += 1
        return text

    def reset(self) -> None:
        self.cursor = 0


class VoskEngine:
    """Offline Kaldi-based recognizer with a local model directory.

    Each decode runs a fresh recognizer over the whole buffer, so results
    depend only on the audio submitted for that request.
    """

    name = "vosk"

    def __init__(self, model_dir: str | Path) -> None:
        try:
            import vosk
        except ImportError as exc:
            raise EngineError(
                "the vosk package is not installed; pip install vosk"
            ) from exc
        model_dir = Path(model_dir)
        if not model_dir.is_dir():
            raise EngineError(f"model directory {model_dir} does not exist")
        vosk.SetLogLevel(-1)
        self._vosk = vosk
        self.model = vosk.Model(str(model_dir))

    def decode(self, pcm: bytes, sample_rate: int) -> str:
        import json

        recognizer = self._vosk.KaldiRecognizer(self.model, sample_rate)
        recognizer.AcceptWaveform(pcm)
        result = json.loads(recognizer.FinalResult())
        return result.get("text", "")

    def reset(self) -> None:
        pass


def build_engine(echo_script: str | None, model_dir: str | None, engine: str = "vosk"):
    """The one place an engine is chosen; swap implementations here."""
    if echo_script is not None:
        return EchoEngine(echo_script)
    if model_dir is None:
        raise EngineError("either --echo SCRIPT or --model DIR is required")
    if engine == "vosk":
        return VoskEngine(model_dir)
    raise EngineError(f"unknown engine {engine!r}")
