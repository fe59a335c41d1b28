import csv
import io
import json
import math

import pytest

from isr_bench.harness import load_manifest, run_dataset, RunConfig
from isr_bench.report import emit_report, render_csv, render_json, render_table


@pytest.fixture(scope="module")
def dataset_result(tmp_path_factory):
    from .conftest import write_wav

    root = tmp_path_factory.mktemp("reports")
    rows = []
    for i, text in enumerate(["alpha bravo charlie", "delta echo foxtrot golf hotel"]):
        wav = write_wav(root / f"u{i}.wav", int(0.4 * 16000 * len(text.split())))
        rows.append(json.dumps({"id": f"u{i}", "audio": wav.name, "text": text}))
    manifest = root / "m.jsonl"
    manifest.write_text("\n".join(rows) + "\n")
    config = RunConfig(backend="oracle", clock="mock", seed=1)
    return run_dataset(load_manifest(manifest), config)


class TestCsv:
    def test_round_trip_full_precision(self, dataset_result):
        payload = render_csv(dataset_result.all_reports).decode()
        rows = list(csv.DictReader(io.StringIO(payload)))
        assert [r["entry_id"] for r in rows] == ["u0", "u1", "aggregate"]
        for parsed, report in zip(rows, dataset_result.all_reports):
            assert float(parsed["lat_s_per_word"]) == report.lat_s_per_word
            assert float(parsed["spr"]) == report.spr or (
                math.isinf(float(parsed["spr"])) and math.isinf(report.spr)
            )
            assert int(parsed["adds"]) == report.count("adds")

    def test_inf_cell_literal(self, dataset_result):
        payload = render_csv(dataset_result.all_reports).decode()
        assert ",inf," in payload


class TestJson:
    def test_structure_and_inf_marker(self, dataset_result):
        doc = json.loads(render_json(dataset_result.all_reports).decode())
        assert {"metadata", "sessions", "aggregate", "failed"} <= set(doc)
        assert doc["aggregate"]["spr"] == "inf"
        assert len(doc["sessions"]) == 2
        assert doc["metadata"]["definitions"]

    def test_valid_strict_json(self, dataset_result):
        payload = render_json(dataset_result.all_reports).decode()
        json.loads(payload)  # would fail on bare Infinity


class TestTable:
    def test_row_order(self, dataset_result):
        table = render_table(dataset_result.all_reports).decode()
        lines = [ln.split()[0] for ln in table.splitlines()[1:]]
        assert lines == ["WER", "LAT", "EO", "R/Sec", "Sec/R"]

    def test_inf_rendering_for_zero_revokes(self, dataset_result):
        table = render_table(dataset_result.all_reports).decode()
        sec_r = [ln for ln in table.splitlines() if ln.startswith("Sec/R")][0]
        assert "inf" in sec_r

    def test_wer_shown_as_percentage_one_decimal(self, dataset_result):
        table = render_table(dataset_result.all_reports).decode()
        wer_row = [ln for ln in table.splitlines() if ln.startswith("WER")][0]
        assert "0.0" in wer_row

    def test_lat_mode_switch(self, dataset_result):
        per_hyp = render_table(dataset_result.all_reports).decode()
        pooled = render_table(dataset_result.all_reports, lat_mode="pooled").decode()
        assert per_hyp.splitlines()[0] == pooled.splitlines()[0]

    def test_unknown_format_rejected(self, dataset_result):
        with pytest.raises(ValueError):
            emit_report(dataset_result.all_reports, "yaml")


class TestFigures:
    def test_files_written(self, dataset_result, tmp_path):
        from isr_bench.figures import render_figures

        written = render_figures(
            dataset_result.all_reports, dataset_result.logs, tmp_path / "figs"
        )
        assert [p.name for p in written] == ["metrics.png", "edit_timeline.png"]
        for path in written:
            assert path.exists()
            assert path.stat().st_size > 1000
