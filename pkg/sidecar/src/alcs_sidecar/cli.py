"""Command line entry: one request manifest per invocation."""

from __future__ import annotations

import argparse
import sys


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="alcs-sidecar",
        description="run one embedding fine-tuning request and emit a DVEC file",
    )
    parser.add_argument("request", help="path to the JSON request manifest")
    args = parser.parse_args(argv)
    try:
        from .runner import run_request

        reply_path = run_request(args.request)
    except Exception as exc:  # noqa: BLE001 - process boundary
        print("error: %s" % exc, file=sys.stderr)
        return 1
    print(reply_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
