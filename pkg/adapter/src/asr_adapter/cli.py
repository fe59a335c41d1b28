"""Entry point: `asr-stdio-adapter --model DIR` or `--echo SCRIPT`."""

from __future__ import annotations

import argparse
import sys

from .engines import EngineError, build_engine
from .service import AdapterService


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="asr-stdio-adapter",
        description="Speech recognizer adapter speaking newline-delimited JSON over stdio",
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--model", help="local model directory for the speech engine")
    source.add_argument("--echo", help="script file: one hypothesis line per decode")
    parser.add_argument("--engine", default="vosk", help="engine behind --model")
    parser.add_argument("--name", help="adapter name reported in the ready message")
    args = parser.parse_args(argv)

    try:
        engine = build_engine(args.echo, args.model, args.engine)
    except EngineError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return 2
    service = AdapterService(engine, name=args.name)
    return service.serve(sys.stdin.buffer, sys.stdout.buffer)


if __name__ == "__main__":
    sys.exit(main())
