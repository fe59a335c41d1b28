"""Command-line entry point.

Subcommands:
    run             stream a manifest through a strategy + backend, write reports
    replay          recompute metrics from stored session logs
    report          re-render stored session logs in another format
    protocol-check  run adapter conformance checks

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .errors import AllSessionsFailed, BenchError
from .harness import (
    RunConfig,
    load_manifest,
    read_session_logs,
    reports_from_logs,
    run_dataset,
)
from .report import METRIC_DEFINITIONS, emit_report
from .protocol_check import run_protocol_checks

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2

_CONFIG_FIELDS = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _coerce(name: str, raw: str):
    current = getattr(RunConfig(), name)
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    return raw


def load_config_file(path: Path) -> dict:
    """Parse a KEY=VALUE config file (# comments, blank lines allowed)."""
    values = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, raw = stripped.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _CONFIG_FIELDS:
            raise ValueError(f"{path}: line {lineno}: unknown or malformed setting {stripped!r}")
        values[key] = _coerce(key, raw.strip())
    return values


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="KEY=VALUE config file; flags override it")
    parser.add_argument("--manifest", required=True, help="JSONL manifest or transcript-index directory")
    parser.add_argument("--strategy", choices=("concatenation", "sliding_window"))
    parser.add_argument("--chunk-ms", type=int, dest="chunk_ms")
    parser.add_argument("--min-words", type=int, dest="min_words")
    parser.add_argument("--max-window-s", type=float, dest="max_window_s")
    parser.add_argument("--trim-fraction", type=float, dest="trim_fraction")
    parser.add_argument("--lexicon", dest="lexicon_path", help="word list, one per line (sliding_window)")
    parser.add_argument("--backend", help="oracle | replay | loopback | host:port | adapter command")
    parser.add_argument("--script", dest="script_path", help="hypothesis script for replay/loopback")
    parser.add_argument("--instability-p", type=float, dest="instability_p")
    parser.add_argument("--substitution-p", type=float, dest="substitution_p")
    parser.add_argument("--decode-s", type=float, dest="decode_s", help="simulated decode time under --clock mock")
    parser.add_argument("--timeout-s", type=float, dest="timeout_s")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--clock", choices=("real", "mock"))
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--format", choices=("csv", "json", "table"), default="table")
    parser.add_argument("--output-dir", type=Path, help="write report files, session logs, and figures here")
    parser.add_argument("--no-figures", action="store_true", help="skip figure rendering")


def build_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config is not None:
        values.update(load_config_file(args.config))
    for name in _CONFIG_FIELDS:
        flag_value = getattr(args, name, None)
        if flag_value is not None:
            values[name] = flag_value
    return RunConfig(**values)


def _report_metadata(config_dict: dict, fingerprint: str, n_failed: int) -> dict:
    return {
        "config": config_dict,
        "config_fingerprint": fingerprint,
        "definitions": METRIC_DEFINITIONS,
        "failed_sessions": n_failed,
    }


def _emit_all(result, metadata: dict, out_dir: Path | None, fmt: str, figures: bool, lat_mode: str = "per_hypothesis") -> bytes:
    rendered = emit_report(
        result.all_reports, fmt, failed=result.failed, metadata=metadata, lat_mode=lat_mode
    )
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "sessions.jsonl").write_text(
            "".join(log.to_text() for log in result.logs), encoding="utf-8"
        )
        for name in ("csv", "json", "table"):
            suffix = "txt" if name == "table" else name
            payload = emit_report(
                result.all_reports, name, failed=result.failed, metadata=metadata, lat_mode=lat_mode
            )
            (out_dir / f"report.{suffix}").write_bytes(payload)
        if figures:
            from .figures import render_figures

            render_figures(result.all_reports, result.logs, out_dir / "figures")
    return rendered


def cmd_run(args: argparse.Namespace) -> int:
    try:
        config = build_config(args)
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    problems = config.validate()
    if problems:
        for p in problems:
            print(f"config error: {p}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        entries = load_manifest(args.manifest)
    except BenchError as exc:
        print(f"manifest error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_dataset(entries, config, workers=args.workers)
    except AllSessionsFailed as exc:
        print(f"all sessions failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    metadata = _report_metadata(config.to_dict(), config.fingerprint(), len(result.failed))
    rendered = _emit_all(result, metadata, args.output_dir, args.format, not args.no_figures)
    sys.stdout.buffer.write(rendered)
    sys.stdout.flush()
    for entry_id, error in result.failed:
        print(f"session {entry_id} failed: {error}", file=sys.stderr)
    return EXIT_OK


def _load_logs(paths: list[str]):
    logs = []
    for path in paths:
        logs.extend(read_session_logs(path))
    return logs


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        logs = _load_logs(args.logs)
        result = reports_from_logs(logs)
    except AllSessionsFailed as exc:
        print(f"all sessions failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except BenchError as exc:
        print(f"log error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    metadata = _report_metadata(
        logs[0].config, logs[0].config_fingerprint, len(result.failed)
    )
    rendered = _emit_all(
        result, metadata, args.output_dir, args.format, not args.no_figures, args.lat_mode
    )
    sys.stdout.buffer.write(rendered)
    sys.stdout.flush()
    return EXIT_OK


def cmd_protocol_check(args: argparse.Namespace) -> int:
    target = args.adapter if len(args.adapter) > 1 else args.adapter[0]
    try:
        results = run_protocol_checks(target, timeout_s=args.timeout_s)
    except BenchError as exc:
        print(f"adapter error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    failed = 0
    for res in results:
        status = "PASS" if res.ok else "FAIL"
        detail = f"  ({res.detail})" if res.detail else ""
        print(f"{status} {res.name}{detail}")
        failed += not res.ok
    if failed:
        print(f"{failed}/{len(results)} checks failed", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isr-bench",
        description="Benchmark incremental speech recognizers on streamed audio",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a manifest through a strategy and backend")
    _add_run_flags(run)
    run.set_defaults(func=cmd_run)

    replay = sub.add_parser("replay", help="recompute metrics from session logs")
    replay.add_argument("logs", nargs="+", help="session log files (JSON lines)")
    replay.add_argument("--format", choices=("csv", "json", "table"), default="table")
    replay.add_argument("--lat-mode", choices=("per_hypothesis", "pooled"), default="per_hypothesis")
    replay.add_argument("--output-dir", type=Path)
    replay.add_argument("--no-figures", action="store_true")
    replay.set_defaults(func=cmd_replay)

    report = sub.add_parser("report", help="re-render session logs in another format")
    report.add_argument("logs", nargs="+", help="session log files (JSON lines)")
    report.add_argument("--format", choices=("csv", "json", "table"), default="table")
    report.add_argument("--lat-mode", choices=("per_hypothesis", "pooled"), default="per_hypothesis")
    report.add_argument("--output-dir", type=Path)
    report.add_argument("--no-figures", action="store_true")
    report.set_defaults(func=cmd_replay)

    check = sub.add_parser("protocol-check", help="adapter conformance checks")
    check.add_argument("adapter", nargs="+", help="adapter command (or host:port)")
    check.add_argument("--timeout-s", type=float, default=5.0, dest="timeout_s")
    check.set_defaults(func=cmd_protocol_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BenchError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
