"""Figure rendering for the report path.

Writes PNG charts next to the delimited report output: one overview panel
of the headline metrics per session, and a timeline of cumulative adds and
revokes for the first sessions. matplotlib is imported lazily so non-figure
code paths stay import-light.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .harness import SessionLog
from .iu import EditOp
from .metrics import MetricsReport


def _matplotlib():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_metric_panels(reports: Sequence[MetricsReport], out_path: Path) -> Path:
    """2x2 bar panel: WER%, latency, edit overhead, revokes/second."""
    plt = _matplotlib()
    labels = [r.entry_id for r in reports]
    panels = [
        ("WER (%)", [r.wer * 100 for r in reports]),
        ("LAT (s/word)", [r.lat_s_per_word for r in reports]),
        ("EO", [r.eo for r in reports]),
        ("R/Sec", [r.rps for r in reports]),
    ]
    fig, axes = plt.subplots(2, 2, figsize=(max(6.4, 0.9 * len(labels) + 3), 7.0))
    for ax, (title, values) in zip(axes.flat, panels):
        colors = ["#777777" if name == "aggregate" else "#4477aa" for name in labels]
        ax.bar(range(len(values)), values, color=colors)
        ax.set_title(title)
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
        ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def render_edit_timeline(logs: Sequence[SessionLog], out_path: Path, max_sessions: int = 6) -> Path:
    """Cumulative adds and revokes against the session clock."""
    plt = _matplotlib()
    shown = [log for log in logs if log.error is None][:max_sessions]
    fig, ax = plt.subplots(figsize=(7.2, 4.2))
    for log in shown:
        times, adds, revokes = [0.0], [0], [0]
        a = r = 0
        for ev in log.events:
            if ev.op is EditOp.ADD:
                a += 1
            elif ev.op is EditOp.REVOKE:
                r += 1
            else:
                continue
            times.append(ev.wall_time)
            adds.append(a)
            revokes.append(r)
        (line,) = ax.step(times, adds, where="post", label=f"{log.entry_id} adds")
        ax.step(
            times,
            revokes,
            where="post",
            linestyle="--",
            color=line.get_color(),
            label=f"{log.entry_id} revokes",
        )
    ax.set_xlabel("session time (s)")
    ax.set_ylabel("cumulative events")
    ax.grid(alpha=0.3)
    if shown:
        ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def render_figures(
    reports: Sequence[MetricsReport], logs: Sequence[SessionLog], out_dir: Path
) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [
        render_metric_panels(reports, out_dir / "metrics.png"),
        render_edit_timeline(logs, out_dir / "edit_timeline.png"),
    ]
    return written
