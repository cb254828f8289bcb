"""Batch figure renderer for diskwave run artifacts.

The package reads only the documented on-disk interfaces of a run
directory -- ``manifest.json``, the raw ``frames.bin`` trajectory file,
and tab-delimited tables such as ``curves.tsv`` -- and renders PNG
figures from them.  It never imports the simulation package.
"""

__version__ = "0.1.0"

from .artifacts import ArtifactError, CurvePoint, Trajectory  # noqa: F401
from .render import FigureSpec, RenderReport, render  # noqa: F401
