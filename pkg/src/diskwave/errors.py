"""Exception types shared across the package and their CLI exit codes."""

from __future__ import annotations

__all__ = ["DiskwaveError", "ConfigError", "NumericalError", "ResonanceError"]


class DiskwaveError(Exception):
    """Base class for all errors raised deliberately by this package."""

    exit_code = 1


class ConfigError(DiskwaveError):
    """Bad user input: unknown keys, unparsable values, infeasible parameters."""

    exit_code = 2


class NumericalError(DiskwaveError):
    """A computation failed to converge or produced non-finite values."""

    exit_code = 3


class ResonanceError(DiskwaveError):
    """A near-singular solve in the center-manifold correction: the requested
    point sits (numerically) on a resonance between the critical mode and a
    non-critical one, where the quadratic corrections are not defined."""

    exit_code = 4
