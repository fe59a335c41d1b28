"""Real-engine sanity run on LibriSpeech test-clean material.

Needs local resources that are not bundled:

    ASR_ADAPTER_VOSK_MODEL   path to an unpacked vosk model directory
    ASR_ADAPTER_LIBRISPEECH  path to a LibriSpeech-layout directory whose
                             utterances have been converted to 16 kHz WAV

Five utterances are streamed through the concatenation strategy; the run
must land well under 30% WER (a deliberately loose bound: stock offline
models score single digits on this material, and the point here is that
real decoding flows through the wire protocol, not to reproduce any
particular published number).
"""

import json
import os
import shutil
import subprocess
import sys

import pytest

HARNESS = shutil.which("isr-bench")
MODEL = os.environ.get("ASR_ADAPTER_VOSK_MODEL")
DATA = os.environ.get("ASR_ADAPTER_LIBRISPEECH")

try:
    import vosk  # noqa: F401

    HAVE_VOSK = True
except ImportError:
    HAVE_VOSK = False

pytestmark = pytest.mark.skipif(
    not (HARNESS and MODEL and DATA and HAVE_VOSK),
    reason="needs isr-bench, vosk, ASR_ADAPTER_VOSK_MODEL, and ASR_ADAPTER_LIBRISPEECH",
)


def collect_utterances(root, limit=5):
    utts = []
    for trans in sorted(__import__("pathlib").Path(root).rglob("*.trans.txt")):
        for line in trans.read_text(encoding="utf-8").splitlines():
            utt_id, _, text = line.partition(" ")
            wav = trans.parent / f"{utt_id}.wav"
            if wav.exists():
                utts.append((utt_id, wav, text.strip()))
            if len(utts) >= limit:
                return utts
    return utts


def test_five_utterance_concatenation_wer_under_30_percent(tmp_path):
    utts = collect_utterances(DATA)
    if len(utts) < 5:
        pytest.skip("fewer than five converted WAV utterances found")
    manifest = tmp_path / "manifest.jsonl"
    manifest.write_text(
        "\n".join(
            json.dumps({"id": utt_id, "audio": str(wav), "text": text})
            for utt_id, wav, text in utts
        )
        + "\n"
    )
    result = subprocess.run(
        [
            HARNESS, "run",
            "--manifest", str(manifest),
            "--strategy", "concatenation",
            "--backend", f"{sys.executable} -m asr_adapter --model {MODEL}",
            "--timeout-s", "120",
            "--format", "json",
        ],
        capture_output=True,
        text=True,
        timeout=1800,
    )
    assert result.returncode == 0, result.stdout + result.stderr
    doc = json.loads(result.stdout)
    assert doc["aggregate"]["wer"] < 0.30, doc["aggregate"]
