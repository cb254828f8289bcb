"""Run manifests: the reproducibility record written next to every output.

A manifest is a JSON document carrying the full config record (so the run
can be repeated from the manifest alone), the resolved parameters,
tolerances and truncation bounds, the seed, the code version, per-stage
wall times, and a checksum for every output file.  Data files themselves
are deterministic; the manifest is the only artifact containing wall
times.

Trajectory frames are stored raw: for each stored time, the prey array
then the predator array, little-endian float64, row-major with the radial
index outermost.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError
from .simulate import PolarGrid, SimResult

__all__ = [
    "FRAME_DTYPE",
    "sha256_file",
    "StageTimer",
    "write_manifest",
    "read_manifest",
    "format_table",
    "write_frames",
    "load_trajectory",
]

FRAME_DTYPE = "<f8"


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class StageTimer:
    """Accumulates named wall-time spans for the manifest."""

    def __init__(self) -> None:
        self.seconds: dict[str, float] = {}
        self._t0: float | None = None
        self._name: str | None = None

    def start(self, name: str) -> None:
        self.stop()
        self._name = name
        self._t0 = time.perf_counter()

    def stop(self) -> None:
        if self._name is not None and self._t0 is not None:
            self.seconds[self._name] = (self.seconds.get(self._name, 0.0)
                                        + time.perf_counter() - self._t0)
        self._name = None
        self._t0 = None


def write_manifest(path: str | Path, *, command: str, config: dict,
                   parameters: dict | None = None,
                   tolerances: dict | None = None,
                   truncation: dict | None = None,
                   seed: int | None = None,
                   timings: dict[str, float] | None = None,
                   outputs: list[Path] | None = None,
                   extra: dict | None = None) -> dict:
    """Assemble and write the manifest; returns the document."""
    path = Path(path)
    out_records = []
    for p in outputs or []:
        p = Path(p)
        out_records.append({
            "name": p.name,
            "bytes": p.stat().st_size,
            "sha256": sha256_file(p),
        })
    doc = {
        "command": command,
        "code_version": __version__,
        "config": {k: str(v) for k, v in config.items()},
        "parameters": parameters or {},
        "tolerances": tolerances or {},
        "truncation": truncation or {},
        "seed": seed,
        "timings": timings or {},
        "outputs": out_records,
    }
    if extra:
        doc.update(extra)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return doc


def read_manifest(path: str | Path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"manifest {path} is not a JSON object")
    return doc


def verify_outputs(manifest: dict, directory: str | Path) -> None:
    """Check that every referenced output exists and matches its checksum."""
    directory = Path(directory)
    for rec in manifest.get("outputs", []):
        target = directory / rec["name"]
        if not target.exists():
            raise ConfigError(f"manifest references missing file {target}")
        digest = sha256_file(target)
        if digest != rec["sha256"]:
            raise ConfigError(
                f"checksum mismatch for {target}: manifest has "
                f"{rec['sha256'][:12]}…, file has {digest[:12]}…")


def format_table(header: list[str], rows: list[tuple]) -> str:
    """Tab-delimited text table; floats at 17 significant digits."""
    def cell(x) -> str:
        if isinstance(x, bool):
            return "true" if x else "false"
        if isinstance(x, float):
            return "%.17g" % x
        return str(x)

    lines = ["\t".join(header)]
    lines.extend("\t".join(cell(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# trajectory frames


def write_frames(path: str | Path, result: SimResult) -> None:
    """Raw frame file: per stored time, u then v (little-endian float64)."""
    stacked = np.stack([result.frames_u, result.frames_v], axis=1)
    stacked.astype(FRAME_DTYPE).tofile(path)


def trajectory_extra(result: SimResult, frames_name: str,
                     initial: dict) -> dict:
    """The trajectory-specific manifest section."""
    g = result.grid
    return {
        "kind": "trajectory",
        "grid": {"n_r": g.n_r, "n_theta": g.n_theta, "R": g.R},
        "times": [float(t) for t in result.times],
        "dt": result.dt,
        "delay_steps": result.n_tau,
        "steps": result.steps,
        "halvings": result.halvings,
        "clipped_cells": result.clipped_cells,
        "initial": initial,
        "frames": {
            "file": frames_name,
            "dtype": FRAME_DTYPE,
            "layout": "per stored time: u then v, row-major, radial index "
                      "outermost",
            "count": int(len(result.times)),
        },
    }


def load_trajectory(manifest_path: str | Path):
    """Read a trajectory manifest back into arrays.

    Returns ``(times, frames_u, frames_v, grid, manifest)``; checksums of
    the frame file are verified first.
    """
    manifest_path = Path(manifest_path)
    doc = read_manifest(manifest_path)
    if doc.get("kind") != "trajectory":
        raise ConfigError(f"{manifest_path} is not a trajectory manifest")
    directory = manifest_path.parent
    verify_outputs(doc, directory)
    g = doc["grid"]
    grid = PolarGrid(int(g["n_r"]), int(g["n_theta"]), float(g["R"]))
    times = np.asarray(doc["times"], dtype=float)
    frames_file = directory / doc["frames"]["file"]
    raw = np.fromfile(frames_file, dtype=FRAME_DTYPE)
    expect = len(times) * 2 * grid.n_r * grid.n_theta
    if raw.size != expect:
        raise ConfigError(
            f"frame file {frames_file} holds {raw.size} values, manifest "
            f"implies {expect}")
    raw = raw.reshape(len(times), 2, grid.n_r, grid.n_theta)
    return times, raw[:, 0].copy(), raw[:, 1].copy(), grid, doc
