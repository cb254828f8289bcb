"""Figure construction: three figure kinds from run artifacts.

* ``curves``: the crossing curves on the taxis-strength/delay plane, one
  polyline per angular/radial mode pair present in the table (only each
  pair's first crossing, lowest ``k``, is drawn).
* ``snapshots``: polar heatmap panels of stored frames at chosen times,
  one row per requested field, rendered in true disk geometry.
* ``strip``: a compact multi-time panel row of one field, the format
  used for pattern-emergence runs.

Rendering is deterministic: a fixed style sheet (bundled DejaVu fonts,
fixed dpi and panel geometry), no timestamps in the output, so identical
inputs give byte-identical PNG files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .artifacts import (ArtifactError, describe_times, load_curves,  # noqa: E402
                        load_trajectory, nearest_frame)

__all__ = ["KINDS", "FIELDS", "STYLE", "FigureSpec", "RenderReport",
           "build_figure", "render"]

KINDS = ("curves", "snapshots", "strip")
FIELDS = ("u", "v", "both")

# Fixed style sheet: everything that affects rasterization is pinned.
# DejaVu ships with matplotlib, so the text pipeline does not depend on
# system fonts.
STYLE = {
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.family": "DejaVu Sans",
    "mathtext.fontset": "dejavusans",
    "font.size": 9.0,
    "axes.titlesize": 9.5,
    "axes.labelsize": 9.0,
    "legend.fontsize": 8.0,
    "xtick.labelsize": 8.0,
    "ytick.labelsize": 8.0,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.4,
    "figure.constrained_layout.use": True,
}

_PANEL_SIZE = {"snapshots": 2.1, "strip": 1.55}   # inches per polar panel


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render from one run directory.

    ``times`` selects snapshot instants (nearest stored frame wins, the
    offset is reported); empty means ``panels`` instants evenly spread
    over the stored span.  ``shared_scale`` gives all panels of a field
    one color scale (the min/max over the selected frames); otherwise
    each panel scales independently.
    """

    manifest: str | Path
    kind: str
    out: str | Path
    times: tuple[float, ...] = ()
    field: str = "u"
    shared_scale: bool = True
    panels: int = 4
    cmap: str = "viridis"
    title: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ArtifactError(
                f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if self.field not in FIELDS:
            raise ArtifactError(
                f"unknown field {self.field!r}; expected one of {FIELDS}")
        if self.panels < 1:
            raise ArtifactError("panels must be >= 1")


@dataclass(frozen=True)
class RenderReport:
    """What was drawn: selected times, their offsets, curve count."""

    kind: str
    out: Path
    times: tuple[float, ...] = ()
    offsets: tuple[float, ...] = ()
    polylines: int = 0
    notes: tuple[str, ...] = field(default=())


# --------------------------------------------------------------------------
# curves


def _build_curves(spec: FigureSpec):
    points = load_curves(spec.manifest)
    fig, ax = plt.subplots(figsize=(4.8, 3.6))
    ax.set_xlabel(r"taxis strength $\chi$")
    ax.set_ylabel(r"critical delay $\tau$")

    groups: dict[tuple[int, int], list] = {}
    for q in points:
        groups.setdefault((q.n, q.m), []).append(q)

    notes = []
    if not groups:
        ax.set_xlim(0.0, 1.0)
        ax.set_ylim(0.0, 1.0)
        ax.text(0.5, 0.5, "no crossing curves in the input table",
                ha="center", va="center", transform=ax.transAxes,
                color="crimson")
        notes.append("empty curve set")
    for (n, m) in sorted(groups):
        rows = groups[(n, m)]
        k0 = min(q.k for q in rows)
        branch = sorted((q for q in rows if q.k == k0),
                        key=lambda q: q.chi)
        ax.plot([q.chi for q in branch], [q.tau for q in branch],
                label=f"({n},{m})")
        dropped = len(rows) - len(branch)
        if dropped:
            notes.append(f"({n},{m}): {dropped} higher-crossing rows "
                         f"not drawn")
    if groups:
        ax.legend(title="mode (n,m)", ncols=2 if len(groups) > 6 else 1)
    if spec.title:
        ax.set_title(spec.title)
    report = RenderReport(kind="curves", out=Path(spec.out),
                          polylines=len(groups), notes=tuple(notes))
    return fig, report


# --------------------------------------------------------------------------
# heatmap panels


def _pick_times(traj, spec: FigureSpec):
    stored = traj.times
    if len(stored) == 0:
        raise ArtifactError("trajectory stores no frames")
    if spec.times:
        requested = list(spec.times)
    else:
        requested = list(np.linspace(stored[0], stored[-1],
                                     spec.panels))
    gaps = np.diff(stored)
    slack = 0.5 * float(np.median(gaps)) if len(gaps) else 0.0
    idx, offsets = [], []
    for t in requested:
        if t < stored[0] - slack or t > stored[-1] + slack:
            raise ArtifactError(
                f"requested time {t:g} is not stored; available times: "
                + describe_times(stored))
        i, off = nearest_frame(stored, t)
        idx.append(i)
        offsets.append(off)
    return idx, offsets


def _build_panels(spec: FigureSpec):
    traj = load_trajectory(spec.manifest)
    idx, offsets = _pick_times(traj, spec)
    fields = ("u", "v") if spec.field == "both" else (spec.field,)
    data = {"u": traj.u, "v": traj.v}

    n_rows, n_cols = len(fields), len(idx)
    size = _PANEL_SIZE[spec.kind]
    fig, axes = plt.subplots(
        n_rows, n_cols, squeeze=False,
        figsize=(size * n_cols + 0.9, size * n_rows + 0.7),
        subplot_kw={"projection": "polar"})

    theta_edges = np.linspace(0.0, 2.0 * math.pi, traj.n_theta + 1)
    r_edges = np.linspace(0.0, traj.R, traj.n_r + 1)

    for row, name in enumerate(fields):
        frames = data[name]
        sel = frames[idx]
        vmin = float(sel.min()) if spec.shared_scale else None
        vmax = float(sel.max()) if spec.shared_scale else None
        if vmin is not None and vmin == vmax:      # flat field: avoid a
            vmin, vmax = vmin - 0.5, vmax + 0.5    # zero-width scale
        mesh = None
        for colno, (i, off) in enumerate(zip(idx, offsets)):
            ax = axes[row][colno]
            mesh = ax.pcolormesh(theta_edges, r_edges, frames[i],
                                 cmap=spec.cmap, vmin=vmin, vmax=vmax,
                                 shading="flat", rasterized=False)
            ax.set_rlim(0.0, traj.R)
            ax.set_xticks([])
            ax.set_yticks([])
            ax.grid(False)
            if row == 0:
                ax.set_title(f"t = {traj.times[i]:g}")
            if colno == 0:
                ax.text(-0.12, 0.5, name, transform=ax.transAxes,
                        ha="right", va="center", fontsize=10.0)
            if not spec.shared_scale:
                fig.colorbar(mesh, ax=ax, fraction=0.046, pad=0.08)
        if spec.shared_scale and mesh is not None:
            fig.colorbar(mesh, ax=list(axes[row]), shrink=0.85,
                         pad=0.03, label=name)

    title = spec.title
    if title is None:
        cfg = traj.manifest.get("config", {})
        bits = [f"{k}={cfg[k]}" for k in ("initial", "chi", "tau")
                if k in cfg]
        title = "  ".join(bits)
    if title:
        fig.suptitle(title)

    notes = tuple(f"t={traj.times[i]:g} for requested "
                  f"{traj.times[i] - off:g} (offset {off:+g})"
                  for i, off in zip(idx, offsets) if off != 0.0)
    report = RenderReport(
        kind=spec.kind, out=Path(spec.out),
        times=tuple(float(traj.times[i]) for i in idx),
        offsets=tuple(offsets), notes=notes)
    return fig, report


# --------------------------------------------------------------------------
# entry points


def build_figure(spec: FigureSpec):
    """Build the matplotlib figure and its report without saving."""
    with plt.rc_context(STYLE):
        if spec.kind == "curves":
            return _build_curves(spec)
        return _build_panels(spec)


def render(spec: FigureSpec) -> RenderReport:
    """Render one figure to ``spec.out`` (PNG) and return the report."""
    fig, report = build_figure(spec)
    try:
        out = Path(spec.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with plt.rc_context(STYLE):
            # strip the writer's software tag so reruns are byte-identical
            fig.savefig(out, format="png", metadata={"Software": None})
    finally:
        plt.close(fig)
    return report
