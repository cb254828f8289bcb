#!/usr/bin/env python3
"""Drive one showcase case end to end: presets -> simulate -> classify.

Emits the named case's preset configs, runs the requested wave kinds,
classifies each trajectory, and prints a one-line verdict per run.  The
heavy lifting is the ordinary CLI; this script only sequences it, so
every artifact on disk is exactly what the equivalent manual commands
would produce.

    python3 scripts/run_showcase.py case1 --out runs/
    python3 scripts/run_showcase.py case2 --kinds rotating-wave --trig
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from diskwave import cli
from diskwave.config import CASE_NAMES

KINDS = ("standing-wave", "rotating-wave")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("case", choices=CASE_NAMES)
    ap.add_argument("--out", default=None,
                    help="output directory (default showcase_<case>)")
    ap.add_argument("--kinds", default=",".join(KINDS),
                    help="comma-separated subset of: " + ", ".join(KINDS))
    ap.add_argument("--trig", action="store_true",
                    help="use the hand-written trig-product seed variants "
                         "instead of the eigenmode seeds")
    args = ap.parse_args(argv)

    base = Path(args.out or f"showcase_{args.case}")
    presets = base / "presets"
    rc = cli.main(["case-preset", args.case, "--out", str(presets)])
    if rc != 0:
        return rc

    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    bad = [k for k in kinds if k not in KINDS]
    if bad:
        ap.error(f"unknown kind(s): {', '.join(bad)}")

    suffix = "-trig" if args.trig else ""
    for kind in kinds:
        config = presets / f"{kind}{suffix}.txt"
        run = base / f"run_{kind}{suffix}"
        cls = base / f"cls_{kind}{suffix}"
        for stage in (["simulate", str(config), "--out", str(run)],
                      ["classify", str(run / "manifest.json"),
                       "--config", str(presets / "classify.txt"),
                       "--out", str(cls)]):
            rc = cli.main(stage)
            if rc != 0:
                return rc
        rep = json.loads((cls / "report.json").read_text())
        vel = rep["phase_velocity"]
        resid = ", ".join(f"{k} {v:.3f}" for k, v in rep["residuals"].items())
        print(f"{args.case} {kind}{suffix}: {rep['classification']} "
              f"(n={rep['n']}, period={rep['period']:.2f}, "
              f"velocity={vel:+.4f}, {resid or 'no residuals'})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
