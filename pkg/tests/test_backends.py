import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isr_bench.audio import AudioChunk
from isr_bench.backends import protocol
from isr_bench.backends.base import (
    Hypothesis,
    NoiseModel,
    OracleRecognizer,
    ReplayRecognizer,
    mangle,
)
from isr_bench.clocks import MockClock
from isr_bench.errors import BadBase64, MalformedLine, SampleRateMismatch, UnknownType

RATE = 16000


def seg(seconds: float, start_s: float = 0.0) -> AudioChunk:
    n = int(seconds * RATE)
    return AudioChunk(
        pcm=b"\x00\x00" * n,
        sample_rate=RATE,
        index=0,
        start_sample=int(start_s * RATE),
    )


class TestHypothesis:
    def test_tokens_derived_from_raw_text(self):
        h = Hypothesis(raw_text="The Fire.", t_submit=0.0, t_receive=0.5)
        assert h.tokens == ("the", "fire")
        assert h.elapsed == pytest.approx(0.5)
        assert h.n_words == 2

    def test_time_ordering_enforced(self):
        with pytest.raises(ValueError):
            Hypothesis(raw_text="a", t_submit=1.0, t_receive=0.5)


class TestReplay:
    def test_scripted_sequence(self):
        clock = MockClock()
        backend = ReplayRecognizer(["should", "showed"])
        assert backend.recognize(seg(1.0), clock).tokens == ("should",)
        assert backend.recognize(seg(2.0), clock).tokens == ("showed",)

    def test_clamps_to_last_entry(self):
        clock = MockClock()
        backend = ReplayRecognizer(["a"])
        for _ in range(6):
            hyp = backend.recognize(seg(1.0), clock)
        assert hyp.tokens == ("a",)

    def test_empty_script_always_empty(self):
        backend = ReplayRecognizer([])
        assert backend.recognize(seg(1.0), MockClock()).tokens == ()

    def test_decode_time_advances_mock_clock(self):
        clock = MockClock()
        backend = ReplayRecognizer(["hi"], decode_s=0.25)
        hyp = backend.recognize(seg(1.0), clock)
        assert hyp.elapsed == pytest.approx(0.25)

    def test_sample_rate_guard(self):
        backend = ReplayRecognizer(["hi"], sample_rate=8000)
        with pytest.raises(SampleRateMismatch):
            backend.recognize(seg(1.0), MockClock())


class TestOracle:
    gold = ["alpha", "bravo", "charlie", "delta"]

    def backend(self, **noise):
        return OracleRecognizer(self.gold, 4.0, NoiseModel(**noise), sample_rate=RATE)

    def test_noise_free_prefix_by_span(self):
        clock = MockClock()
        backend = self.backend()
        # word midpoints sit at 0.5, 1.5, 2.5, 3.5 s
        assert backend.recognize(seg(1.0), clock).tokens == ("alpha",)
        assert backend.recognize(seg(2.0), clock).tokens == ("alpha", "bravo")
        assert backend.recognize(seg(4.0), clock).tokens == tuple(self.gold)

    def test_window_span_selects_interior_words(self):
        clock = MockClock()
        backend = self.backend()
        hyp = backend.recognize(seg(2.0, start_s=1.0), clock)  # covers [1.0, 3.0)
        assert hyp.tokens == ("bravo", "charlie")

    def test_instability_one_revokes_every_new_word(self):
        clock = MockClock()
        backend = self.backend(instability_p=1.0)
        first = backend.recognize(seg(1.0), clock)
        assert first.tokens == (mangle("alpha"),)
        second = backend.recognize(seg(2.0), clock)
        # the corrupted word reverted, the new last word is corrupted
        assert second.tokens == ("alpha", mangle("bravo"))

    def test_determinism_per_seed(self):
        spans = [(1.0, 0.0), (2.0, 0.0), (3.0, 0.5), (4.0, 0.5)]

        def run(seed):
            clock = MockClock()
            backend = OracleRecognizer(
                self.gold, 4.0, NoiseModel(0.5, 0.3, seed=seed), sample_rate=RATE
            )
            return [
                backend.recognize(seg(s, start_s=o), clock).raw_text for s, o in spans
            ]

        assert run(9) == run(9)
        assert run(9) != run(10)  # overwhelmingly likely under these probabilities

    def test_substitution_is_permanent(self):
        clock = MockClock()
        backend = self.backend(substitution_p=1.0)
        first = backend.recognize(seg(1.0), clock)
        second = backend.recognize(seg(2.0), clock)
        assert first.tokens[0] == mangle("alpha")
        assert second.tokens[0] == mangle("alpha")


def field_strategy(name):
    if name in ("seq", "sample_rate", "version"):
        return st.integers(min_value=0, max_value=2**31)
    if name == "final":
        return st.booleans()
    if name == "data":
        return st.binary(max_size=64).map(
            lambda b: __import__("base64").b64encode(b).decode()
        )
    return st.text(max_size=40)


@st.composite
def protocol_messages(draw):
    msg_type = draw(st.sampled_from(sorted(protocol._FIELD_SPECS)))
    fields = {
        name: draw(field_strategy(name))
        for name in protocol._FIELD_SPECS[msg_type]
    }
    return protocol.message(msg_type, **fields)


class TestProtocolCodec:
    def test_init_line_contains_fields(self):
        line = protocol.encode_message(
            protocol.message(
                "init", sample_rate=16000, encoding="pcm_s16le", version=1
            )
        )
        assert line.endswith(b"\n")
        assert b'"sample_rate":16000' in line
        assert b'"encoding":"pcm_s16le"' in line

    def test_audio_round_trip_payload(self):
        pcm = struct.pack("<4h", 1, -2, 3, -4)
        msg = protocol.audio_message(seq=3, pcm=pcm)
        decoded = protocol.decode_message(protocol.encode_message(msg))
        assert protocol.pcm_from_audio(decoded) == pcm

    def test_malformed_line(self):
        with pytest.raises(MalformedLine):
            protocol.decode_message(b"xyz")

    def test_unknown_type(self):
        with pytest.raises(UnknownType):
            protocol.decode_message(b'{"type":"mystery"}')

    def test_missing_field(self):
        with pytest.raises(MalformedLine):
            protocol.decode_message(b'{"type":"decode"}')

    def test_bool_not_accepted_as_seq(self):
        with pytest.raises(MalformedLine):
            protocol.decode_message(b'{"type":"decode","seq":true}')

    def test_bad_base64(self):
        with pytest.raises(BadBase64):
            protocol.decode_message(b'{"type":"audio","seq":0,"data":"!!!not-b64"}')

    @settings(max_examples=200, deadline=None)
    @given(msg=protocol_messages())
    def test_round_trip_any_message(self, msg):
        assert protocol.decode_message(protocol.encode_message(msg)) == msg
