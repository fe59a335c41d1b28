"""Wire-level behavior of the adapter process."""

import sys

from .conftest import AdapterProc, silence


class TestHandshake:
    def test_init_ready(self, adapter):
        msg = adapter.init()
        assert msg["type"] == "ready"
        assert msg["name"].startswith("asr-stdio-adapter")

    def test_message_before_init_is_fatal(self, adapter):
        adapter.send({"type": "decode", "seq": 0})
        msg = adapter.recv()
        assert msg["type"] == "error"
        assert adapter.close() != 0

    def test_unsupported_encoding_rejected(self, adapter):
        adapter.send(
            {"type": "init", "sample_rate": 16000, "encoding": "mp3", "version": 1}
        )
        assert adapter.recv()["type"] == "error"

    def test_custom_name(self, echo_script):
        proc = AdapterProc(
            [
                sys.executable, "-m", "asr_adapter",
                "--echo", str(echo_script), "--name", "custom-rig",
            ]
        )
        try:
            assert proc.init()["name"] == "custom-rig"
        finally:
            proc.close()


class TestDecode:
    def test_scripted_hypotheses_in_order(self, adapter):
        adapter.init()
        adapter.send_audio(0, silence())
        first = adapter.decode(0)
        adapter.send_audio(1, silence())
        second = adapter.decode(1)
        assert (first["type"], first["seq"], first["text"]) == ("hypothesis", 0, "should")
        assert first["final"] is False
        assert (second["seq"], second["text"]) == (1, "showed")
        assert second["decode_s"] >= 0

    def test_decode_consumes_all_pending_up_to_seq(self, adapter):
        adapter.init()
        adapter.send_audio(0, silence())
        adapter.send_audio(1, silence())
        msg = adapter.decode(1)
        assert msg["seq"] == 1
        # both buffers consumed as one segment: only one script line used
        assert msg["text"] == "should"

    def test_idempotent_without_new_audio(self, adapter):
        adapter.init()
        adapter.send_audio(0, silence())
        first = adapter.decode(0)
        second = adapter.decode(0)
        assert first["text"] == second["text"] == "should"

    def test_decode_without_audio_is_empty(self, adapter):
        adapter.init()
        msg = adapter.decode(5)
        assert msg["type"] == "hypothesis"
        assert msg["text"] == ""

    def test_eof_marks_final(self, adapter):
        adapter.init()
        adapter.send_audio(0, silence())
        msg = adapter.decode(0, final=True)
        assert msg["final"] is True


class TestResetAndErrors:
    def test_reset_restarts_script_and_seq_space(self, adapter):
        adapter.init()
        adapter.send_audio(0, silence())
        assert adapter.decode(0)["text"] == "should"
        adapter.send({"type": "reset"})
        adapter.send_audio(0, silence())
        assert adapter.decode(0)["text"] == "should"

    def test_malformed_line_is_fatal_error(self, adapter):
        adapter.init()
        adapter.send(b"definitely not json")
        assert adapter.recv()["type"] == "error"
        assert adapter.close() != 0

    def test_unknown_type_is_error(self, adapter):
        adapter.init()
        adapter.send({"type": "telepathy"})
        assert adapter.recv()["type"] == "error"

    def test_bad_base64_is_error(self, adapter):
        adapter.init()
        adapter.send({"type": "audio", "seq": 0, "data": "!!!"})
        assert adapter.recv()["type"] == "error"

    def test_missing_field_is_error(self, adapter):
        adapter.init()
        adapter.send({"type": "decode"})
        assert adapter.recv()["type"] == "error"

    def test_clean_eof_exit(self, adapter):
        adapter.init()
        assert adapter.close() == 0
