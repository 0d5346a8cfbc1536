"""Command line renderer: manifest in, figures out."""

import argparse
import sys

from .render import MissingColumnError, render_manifest


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drgp-render",
        description="Render figures from a drgp run manifest",
    )
    parser.add_argument("--manifest", required=True, help="path to manifest.json")
    parser.add_argument("--out", required=True, help="output directory for images")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        written = render_manifest(args.manifest, args.out)
    except MissingColumnError as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    if not written:
        print("render error: manifest lists no figure data", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
