"""Command-line batch renderer.

Exit codes: 0 success, 2 usage or argument errors, 3 artifact errors
(missing, corrupt, or mismatching run files).
"""

from __future__ import annotations

import argparse
import sys

from .artifacts import (ArtifactError, describe_times, read_manifest)
from .render import FIELDS, KINDS, FigureSpec, render

__all__ = ["main"]


def _parse_times(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"bad time list {text!r}: {exc}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diskfigs",
        description="Render figures from diskwave run directories.")
    sub = parser.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("render", help="render one figure from one run")
    pr.add_argument("--manifest", required=True,
                    help="run directory or its manifest.json")
    pr.add_argument("--kind", required=True, choices=KINDS)
    pr.add_argument("--out", required=True, help="output PNG path")
    pr.add_argument("--times", type=_parse_times, default=(),
                    help="comma-separated snapshot times "
                         "(default: spread over the stored span)")
    pr.add_argument("--field", choices=FIELDS, default="u")
    pr.add_argument("--panels", type=int, default=4,
                    help="panel count when --times is not given")
    pr.add_argument("--cmap", default="viridis")
    pr.add_argument("--independent-scales", action="store_true",
                    help="scale each panel separately instead of sharing "
                         "one color scale")
    pr.add_argument("--title", default=None)
    pr.set_defaults(func=_cmd_render)

    pi = sub.add_parser("inspect", help="summarize a run directory")
    pi.add_argument("--manifest", required=True)
    pi.set_defaults(func=_cmd_inspect)
    return parser


def _cmd_render(args) -> int:
    spec = FigureSpec(
        manifest=args.manifest, kind=args.kind, out=args.out,
        times=args.times, field=args.field,
        shared_scale=not args.independent_scales, panels=args.panels,
        cmap=args.cmap, title=args.title)
    report = render(spec)
    for note in report.notes:
        print(f"note: {note}")
    if report.kind == "curves":
        print(f"wrote {report.out} ({report.polylines} mode curves)")
    else:
        shown = ", ".join(f"{t:g}" for t in report.times)
        print(f"wrote {report.out} (times {shown})")
    return 0


def _cmd_inspect(args) -> int:
    doc = read_manifest(args.manifest)
    print(f"command: {doc.get('command')}")
    if doc.get("kind"):
        print(f"kind: {doc['kind']}")
    for rec in doc.get("outputs", []):
        print(f"output: {rec['name']} ({rec['bytes']} bytes)")
    if "grid" in doc:
        g = doc["grid"]
        print(f"grid: {g.get('n_r')} x {g.get('n_theta')}, R = {g.get('R')}")
    if "times" in doc:
        import numpy as np
        print("times: " + describe_times(np.asarray(doc["times"],
                                                    dtype=float)))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ArtifactError as exc:
        print(f"diskfigs: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
