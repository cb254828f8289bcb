"""Fixture artifacts written directly in the documented run formats.

Nothing here imports the simulation package: the fixtures reproduce the
on-disk interface from its documentation, which is exactly the contract
the renderer depends on.
"""

import hashlib
import json
import math
from pathlib import Path

import numpy as np
import pytest


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(directory: Path, *, command: str, outputs: list[Path],
                   extra: dict | None = None, config: dict | None = None):
    doc = {
        "command": command,
        "code_version": "fixture",
        "config": {k: str(v) for k, v in (config or {}).items()},
        "parameters": {},
        "tolerances": {},
        "truncation": {},
        "seed": None,
        "timings": {},
        "outputs": [
            {"name": p.name, "bytes": p.stat().st_size, "sha256": _sha256(p)}
            for p in outputs
        ],
    }
    if extra:
        doc.update(extra)
    path = directory / "manifest.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def make_trajectory(directory: Path, *, n_r: int = 6, n_theta: int = 12,
                    count: int = 5, R: float = 10.0,
                    spacing: float = 2.0) -> Path:
    """A small synthetic trajectory run in the raw-frame format."""
    directory.mkdir(parents=True, exist_ok=True)
    times = spacing * np.arange(count)
    r = (np.arange(n_r) + 0.5) * (R / n_r)
    th = 2.0 * math.pi * np.arange(n_theta) / n_theta
    rr, tt = np.meshgrid(r, th, indexing="ij")
    u = np.stack([4.0 + 0.5 * np.sin(0.3 * t) * (rr / R) * np.cos(tt)
                  for t in times])
    v = np.stack([5.0 / 3.0 + 0.2 * np.cos(0.3 * t) * (rr / R) ** 2
                  * np.cos(2 * tt) for t in times])
    frames = directory / "frames.bin"
    np.stack([u, v], axis=1).astype("<f8").tofile(frames)
    return write_manifest(
        directory, command="simulate", outputs=[frames],
        config={"initial": "standing-n1", "chi": 0.38, "tau": 9.88},
        extra={
            "kind": "trajectory",
            "grid": {"n_r": n_r, "n_theta": n_theta, "R": R},
            "times": [float(t) for t in times],
            "dt": 0.04,
            "frames": {
                "file": "frames.bin",
                "dtype": "<f8",
                "layout": "per stored time: u then v, row-major, radial "
                          "index outermost",
                "count": count,
            },
        })


def make_curves(directory: Path, rows: list[tuple] | None = None) -> Path:
    """A crossing-curve run with the documented table columns."""
    directory.mkdir(parents=True, exist_ok=True)
    if rows is None:
        rows = []
        for i, chi in enumerate(np.linspace(0.3, 0.6, 7)):
            rows.append((chi, 1, 1, 0, 0.13 + 0.01 * i, 9.0 - 0.2 * i,
                         0.005))
            rows.append((chi, 1, 1, 1, 0.13 + 0.01 * i, 20.0 - 0.3 * i,
                         0.004))
            rows.append((chi, 2, 1, 0, 0.15 + 0.01 * i, 10.5 - 0.25 * i,
                         0.006))
        rows.append((0.5, 0, 2, 0, 0.21, 8.2, 0.007))
    lines = ["\t".join(["chi", "n", "m", "k", "omega_star", "tau_c",
                        "transversality"])]
    for row in rows:
        lines.append("\t".join(
            "%.17g" % x if isinstance(x, float) else str(x) for x in row))
    table = directory / "curves.tsv"
    table.write_text("\n".join(lines) + "\n")
    return write_manifest(directory, command="hopf-curves", outputs=[table],
                          config={"chi_min": 0.3, "chi_max": 0.6})


@pytest.fixture
def trajectory_run(tmp_path):
    return make_trajectory(tmp_path / "run")


@pytest.fixture
def curves_run(tmp_path):
    return make_curves(tmp_path / "curves")
