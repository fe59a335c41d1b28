"""Render metric reports as CSV, JSON, or an aligned text table.

CSV and JSON carry every value at full precision (floats round-trip);
rounding happens only in the table renderer, which shows WER as a
percentage with one decimal and the remaining rates with three. A session
with zero revokes renders its seconds-per-revoke cell as "inf".
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Sequence

from .metrics import MetricsReport

CSV_COLUMNS = (
    "entry_id",
    "wer",
    "lat_s_per_word",
    "lat_pooled",
    "eo",
    "rps",
    "spr",
    "time_s",
    "wall_s",
    "adds",
    "revokes",
    "commits",
    "words",
    "substitutions",
    "deletions",
    "insertions",
    "ref_words",
)

TABLE_ROWS = ("WER", "LAT", "EO", "R/Sec", "Sec/R")

METRIC_DEFINITIONS = {
    "lat": "mean over predictions of (t_receive - t_submit) / words in that prediction",
    "lat_pooled": "total recognition time / total predicted words (diagnostic)",
    "time_s": "cumulative recognition time: sum of per-hypothesis elapsed",
    "wall_s": "session wall-clock seconds, reported separately",
    "spr": "1 / rps; inf means zero revokes",
    "aggregate": "micro-average: counts pooled across sessions, then formulas applied",
}


def _cell(value: float | int) -> str:
    if isinstance(value, float):
        return repr(value)  # shortest round-trip form; inf stays "inf"
    return str(value)


def _json_value(value: float) -> float | str:
    return value if math.isfinite(value) else "inf"


def report_row(report: MetricsReport) -> dict:
    return {
        "entry_id": report.entry_id,
        "wer": report.wer,
        "lat_s_per_word": report.lat_s_per_word,
        "lat_pooled": report.lat_pooled,
        "eo": report.eo,
        "rps": report.rps,
        "spr": report.spr,
        "time_s": report.time_s,
        "wall_s": report.wall_s,
        "adds": report.count("adds"),
        "revokes": report.count("revokes"),
        "commits": report.count("commits"),
        "words": report.count("words"),
        "substitutions": report.count("substitutions"),
        "deletions": report.count("deletions"),
        "insertions": report.count("insertions"),
        "ref_words": report.count("ref_words"),
    }


def render_csv(reports: Sequence[MetricsReport]) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for report in reports:
        row = report_row(report)
        writer.writerow([_cell(row[col]) for col in CSV_COLUMNS])
    return out.getvalue().encode("utf-8")


def render_json(
    reports: Sequence[MetricsReport],
    *,
    failed: Sequence[tuple[str, str]] = (),
    metadata: dict | None = None,
) -> bytes:
    sessions = [r for r in reports if r.entry_id != "aggregate"]
    aggregates = [r for r in reports if r.entry_id == "aggregate"]

    def row(r: MetricsReport) -> dict:
        d = report_row(r)
        d["spr"] = _json_value(d["spr"])
        return d

    doc = {
        "metadata": dict(metadata or {}),
        "sessions": [row(r) for r in sessions],
        "aggregate": row(aggregates[0]) if aggregates else None,
        "failed": [{"entry_id": e, "error": msg} for e, msg in failed],
    }
    doc["metadata"].setdefault("definitions", METRIC_DEFINITIONS)
    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _format_metric(row: str, report: MetricsReport, lat_mode: str) -> str:
    if row == "WER":
        return f"{report.wer * 100:.1f}"
    if row == "LAT":
        lat = report.lat_pooled if lat_mode == "pooled" else report.lat_s_per_word
        return f"{lat:.3f}"
    if row == "EO":
        return f"{report.eo:.3f}"
    if row == "R/Sec":
        return f"{report.rps:.3f}"
    value = report.spr
    return "inf" if math.isinf(value) else f"{value:.3f}"


def render_table(reports: Sequence[MetricsReport], lat_mode: str = "per_hypothesis") -> bytes:
    """Aligned text table: metrics as rows, one column per session."""
    headers = [""] + [r.entry_id for r in reports]
    rows = [
        [label] + [_format_metric(label, r, lat_mode) for r in reports]
        for label in TABLE_ROWS
    ]
    widths = [max(len(line[i]) for line in [headers] + rows) for i in range(len(headers))]
    lines = []
    for line in [headers] + rows:
        lines.append(
            "  ".join(cell.rjust(w) if i else cell.ljust(w) for i, (cell, w) in enumerate(zip(line, widths))).rstrip()
        )
    return ("\n".join(lines) + "\n").encode("utf-8")


def emit_report(
    reports: Sequence[MetricsReport],
    fmt: str,
    *,
    failed: Sequence[tuple[str, str]] = (),
    metadata: dict | None = None,
    lat_mode: str = "per_hypothesis",
) -> bytes:
    if fmt == "csv":
        return render_csv(reports)
    if fmt == "json":
        return render_json(reports, failed=failed, metadata=metadata)
    if fmt == "table":
        return render_table(reports, lat_mode=lat_mode)
    raise ValueError(f"unknown report format {fmt!r}")
