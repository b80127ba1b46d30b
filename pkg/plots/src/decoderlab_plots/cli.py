"""`decoderlab-plot <kind> --in <path> --out <path.png|svg>`."""

from __future__ import annotations

import argparse
import sys

from .figures import SchemaError, plot_cantor, plot_runtime, plot_threshold

_KINDS = {
    "threshold": plot_threshold,
    "runtime": plot_runtime,
    "cantor": plot_cantor,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="decoderlab-plot", description=__doc__)
    p.add_argument("kind", choices=sorted(_KINDS))
    p.add_argument("--in", dest="input", required=True, help="CSV or JSON input")
    p.add_argument("--out", required=True, help="output image (.png or .svg)")
    return p


def dispatch(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _KINDS[args.kind](args.input, args.out)
    except (SchemaError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


def main() -> None:
    raise SystemExit(dispatch())


if __name__ == "__main__":
    main()
