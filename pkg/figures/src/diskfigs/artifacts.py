"""Readers for the run-directory interfaces the renderer consumes.

A run directory holds ``manifest.json`` plus the output files the
manifest checksums.  Two layouts matter here:

* a trajectory run (``"kind": "trajectory"``): a raw ``frames.bin`` with,
  for each stored time, the prey array then the predator array,
  little-endian float64, row-major with the radial index outermost; the
  manifest carries the grid shape and the stored times;
* a crossing-curve run: a ``curves.tsv`` table with columns
  ``chi  n  m  k  omega_star  tau_c  transversality``.

Every reader verifies the manifest checksums before trusting a byte of
the data files.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "ArtifactError",
    "CurvePoint",
    "Trajectory",
    "read_manifest",
    "load_curves",
    "load_trajectory",
    "nearest_frame",
    "describe_times",
]

FRAME_DTYPE = "<f8"


class ArtifactError(Exception):
    """A run artifact is missing, corrupt, or of the wrong kind."""


@dataclass(frozen=True)
class CurvePoint:
    """One row of a crossing-curve table."""

    chi: float
    n: int
    m: int
    k: int
    omega: float
    tau: float
    transversality: float


@dataclass(frozen=True)
class Trajectory:
    """A stored trajectory: times plus both fields on the polar grid."""

    times: np.ndarray          # (T,)
    u: np.ndarray              # (T, n_r, n_theta)
    v: np.ndarray              # (T, n_r, n_theta)
    n_r: int
    n_theta: int
    R: float
    manifest: dict
    directory: Path


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def read_manifest(path: str | Path) -> dict:
    """Parse ``manifest.json`` (the file itself or its directory)."""
    path = Path(path)
    if path.is_dir():
        path = path / "manifest.json"
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ArtifactError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"manifest {path} is not valid JSON: {exc}") \
            from exc
    if not isinstance(doc, dict):
        raise ArtifactError(f"manifest {path} is not a JSON object")
    doc["_path"] = str(path)
    return doc


def _verify_outputs(doc: dict, directory: Path) -> None:
    for rec in doc.get("outputs", []):
        target = directory / rec["name"]
        if not target.exists():
            raise ArtifactError(
                f"manifest references missing file {target}")
        digest = _sha256(target)
        if digest != rec["sha256"]:
            raise ArtifactError(
                f"checksum mismatch for {target}: manifest has "
                f"{rec['sha256'][:12]}…, file has {digest[:12]}…")


def load_curves(manifest_path: str | Path) -> list[CurvePoint]:
    """Crossing-curve rows from a run directory, checksum-verified."""
    doc = read_manifest(manifest_path)
    directory = Path(doc["_path"]).parent
    _verify_outputs(doc, directory)

    names = [rec["name"] for rec in doc.get("outputs", [])]
    tables = [n for n in names if n.endswith(".tsv")]
    if "curves.tsv" in tables:
        table = directory / "curves.tsv"
    elif len(tables) == 1:
        table = directory / tables[0]
    else:
        raise ArtifactError(
            f"no curve table among manifest outputs {names}")

    lines = table.read_text().splitlines()
    if not lines:
        raise ArtifactError(f"{table} is empty (not even a header)")
    header = lines[0].split("\t")
    needed = ("chi", "n", "m", "k", "omega_star", "tau_c")
    missing = [c for c in needed if c not in header]
    if missing:
        raise ArtifactError(
            f"{table} lacks required columns {missing}; header is {header}")
    col = {name: header.index(name) for name in header}

    points = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split("\t")
        if len(cells) != len(header):
            raise ArtifactError(
                f"{table}:{ln}: {len(cells)} cells for {len(header)} columns")
        try:
            points.append(CurvePoint(
                chi=float(cells[col["chi"]]),
                n=int(cells[col["n"]]),
                m=int(cells[col["m"]]),
                k=int(cells[col["k"]]),
                omega=float(cells[col["omega_star"]]),
                tau=float(cells[col["tau_c"]]),
                transversality=float(cells[col["transversality"]])
                if "transversality" in col else float("nan"),
            ))
        except ValueError as exc:
            raise ArtifactError(f"{table}:{ln}: {exc}") from exc
    return points


def load_trajectory(manifest_path: str | Path) -> Trajectory:
    """Frames and metadata of a trajectory run, checksum-verified."""
    doc = read_manifest(manifest_path)
    directory = Path(doc["_path"]).parent
    if doc.get("kind") != "trajectory":
        raise ArtifactError(
            f"{directory} is not a trajectory run "
            f"(kind={doc.get('kind')!r}, command={doc.get('command')!r})")
    _verify_outputs(doc, directory)

    frames_info = doc["frames"]
    if frames_info.get("dtype") != FRAME_DTYPE:
        raise ArtifactError(
            f"unsupported frame dtype {frames_info.get('dtype')!r}; "
            f"expected {FRAME_DTYPE}")
    grid = doc["grid"]
    n_r, n_theta = int(grid["n_r"]), int(grid["n_theta"])
    count = int(frames_info["count"])
    times = np.asarray(doc["times"], dtype=float)
    if len(times) != count:
        raise ArtifactError(
            f"manifest lists {len(times)} times but {count} frames")

    frames_path = directory / frames_info["file"]
    expect = count * 2 * n_r * n_theta * 8
    actual = frames_path.stat().st_size
    if actual != expect:
        raise ArtifactError(
            f"{frames_path} holds {actual} bytes; expected {expect} "
            f"({count} frames of 2x{n_r}x{n_theta} float64)")
    raw = np.fromfile(frames_path, dtype=FRAME_DTYPE)
    raw = raw.reshape(count, 2, n_r, n_theta)
    return Trajectory(times=times, u=raw[:, 0], v=raw[:, 1],
                      n_r=n_r, n_theta=n_theta, R=float(grid["R"]),
                      manifest=doc, directory=directory)


def nearest_frame(times: np.ndarray, t: float) -> tuple[int, float]:
    """Index of the stored time closest to ``t`` and the signed offset
    ``times[index] - t``."""
    idx = int(np.argmin(np.abs(times - t)))
    return idx, float(times[idx] - t)


def describe_times(times: np.ndarray) -> str:
    """Human-readable list of the stored times for error messages."""
    if len(times) <= 16:
        return ", ".join(f"{t:g}" for t in times)
    gaps = np.diff(times)
    return (f"{times[0]:g} to {times[-1]:g} in {len(times)} frames "
            f"(spacing {gaps.min():g}"
            + (f" to {gaps.max():g}" if gaps.max() - gaps.min() > 1e-9
               else "") + ")")
