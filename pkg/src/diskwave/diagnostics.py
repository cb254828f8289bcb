"""Classification of simulated trajectories into wave types.

The discriminator works on the band-averaged complex angular coefficients
``a_n(t)`` of the prey deviation.  A real field always has conjugate
``+n``/``-n`` spatial coefficients, so rotation versus standing is decided
by the two *temporal* sidebands of ``a_n(t)``:

* a rigidly rotating wave concentrates on one sideband — its phase drifts
  linearly and the drift sign gives the sense (positive phase velocity =
  counterclockwise);
* a standing wave keeps both sidebands balanced and its nodal axes (the
  zero diameters of the angular factor) stay put;
* everything else is reported as ``other``, and windows whose amplitude is
  still trending are ``inconclusive``.

Classification thresholds live in :class:`DiagnosticsConfig`, not in code.
Symmetry checks compare a trajectory against a shifted copy of itself
(grid-step rotations, optional reflection, linear interpolation in time)
and report a relative L2 residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConfigError, NumericalError
from .simulate import PolarGrid

__all__ = [
    "DiagnosticsConfig",
    "WaveReport",
    "SymmetryShift",
    "angular_spectrum",
    "band_coefficients",
    "dominant_wavenumber",
    "estimate_frequency",
    "classify",
    "symmetry_residual",
]

RELATIONS = ("identity", "rotation", "half-period-rotation",
             "half-period-reflection")


@dataclass(frozen=True)
class DiagnosticsConfig:
    """Tunable thresholds for trajectory classification."""

    residual_threshold: float = 0.05   # winning relation must beat this
    balance_tol: float = 0.10          # sideband balance for standing
    minority_tol: float = 0.10         # max minority sideband for rotating
    drift_tol: float = 0.01            # amplitude trend per period -> settle
    axis_motion_tol: float = 0.15      # nodal-axis wobble (radians)
    phase_fit_tol: float = 0.5         # rms of the linear phase fit (rad)
    band: tuple[float, float] = (0.35, 0.75)  # radius band, fractions of R
    n_max: int = 8
    min_periods: int = 3


@dataclass(frozen=True)
class WaveReport:
    """Outcome of classifying one trajectory window."""

    classification: str                # rotating-cw | rotating-ccw |
    n: int                             # standing | other | inconclusive
    period: float
    phase_velocity: float              # radians per time, positive = ccw
    axis_angles: tuple[float, ...]     # nodal diameters (standing only)
    residuals: dict[str, float]
    amplitude: float                   # rms L2 deviation from steady state
    sidebands: tuple[float, float]     # (|e^{+iwt}|, |e^{-iwt}|) weights
    window: tuple[float, float]
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SymmetryShift:
    """Realized transform of a symmetry-residual evaluation."""

    value: float
    angle_requested: float
    angle_used: float            # nearest grid-representable rotation
    reflected: bool
    time_shift: float


def angular_spectrum(frame: np.ndarray, grid: PolarGrid, u_star: float,
                     band: tuple[float, float] = (0.35, 0.75),
                     n_max: int = 8) -> np.ndarray:
    """Band-averaged complex angular coefficients of one frame.

    Returns ``a[n]`` for ``n = 0..n_max`` with the convention
    ``a_n = <(u - u*) e^{-i n theta}>``; the ``-n`` coefficients of the
    real field are their conjugates.  Rotating the frame by one grid step
    (``roll(+1)``) multiplies ``a_n`` by ``e^{-i n dtheta}``.
    """
    lo, hi = band
    r = grid.r_centers
    sel = (r >= lo * grid.R) & (r <= hi * grid.R)
    if not sel.any():
        raise ConfigError("radius band selects no grid rings")
    w = r[sel]
    coef = np.fft.fft(frame[sel] - u_star, axis=1) / grid.n_theta
    avg = (w[:, None] * coef).sum(axis=0) / w.sum()
    return avg[:n_max + 1]


def band_coefficients(frames: np.ndarray, grid: PolarGrid, u_star: float,
                      band: tuple[float, float], n_max: int) -> np.ndarray:
    """``a_n(t)`` for a whole trajectory, shape (frames, n_max+1)."""
    return np.stack([angular_spectrum(f, grid, u_star, band, n_max)
                     for f in frames])


def dominant_wavenumber(coeffs: np.ndarray) -> int:
    """Wavenumber (``>= 1`` preferred) with the largest rms coefficient;
    returns 0 only when the axisymmetric part dominates every other."""
    rms = np.sqrt((np.abs(coeffs) ** 2).mean(axis=0))
    n_best = int(np.argmax(rms[1:])) + 1 if coeffs.shape[1] > 1 else 0
    if rms[0] > 2.0 * rms[n_best]:
        return 0
    return n_best


def _sideband_fit(t: np.ndarray, z: np.ndarray, omega: float):
    """Least-squares ``z ~ p e^{i w t} + q e^{-i w t} + c``."""
    X = np.column_stack([np.exp(1j * omega * t), np.exp(-1j * omega * t),
                         np.ones_like(t)])
    sol, *_ = np.linalg.lstsq(X, z, rcond=None)
    resid = z - X @ sol
    return sol, float(np.sum(np.abs(resid) ** 2))


def estimate_frequency(t: np.ndarray, z: np.ndarray) -> float:
    """Temporal angular frequency of a sampled complex oscillation.

    A coarse FFT peak of the detrended series brackets the answer; the
    two-sideband least-squares residual is then minimized in that bracket,
    which (unlike bin interpolation) does not depend on where the sampling
    window sits relative to the period.
    """
    dt = float(t[1] - t[0])
    zc = z - z.mean()
    spec = np.abs(np.fft.fft(zc * np.hanning(len(zc))))
    freqs = np.fft.fftfreq(len(zc), dt) * 2.0 * math.pi
    order = np.argsort(-spec)
    w0 = abs(float(freqs[order[0]]))
    if w0 == 0.0:
        w0 = abs(float(freqs[order[1]]))
    if w0 == 0.0:
        raise NumericalError("no oscillation found in the window")
    df = 2.0 * math.pi / (len(zc) * dt)
    lo = max(w0 - 1.5 * df, 0.25 * df)
    hi = w0 + 1.5 * df
    res = minimize_scalar(
        lambda w: _sideband_fit(t, z, w)[1], bounds=(lo, hi),
        method="bounded", options={"xatol": 1e-10 * max(w0, 1.0)})
    w = float(res.x)
    # The least-squares basin is flat near the optimum; polish by
    # demodulating the weaker sideband and reading the phase slope of the
    # remainder, which stays window-position independent.
    for _ in range(3):
        (p, q, c0), _ = _sideband_fit(t, z, w)
        if abs(p) >= abs(q):
            d = z - c0 - q * np.exp(-1j * w * t)
            sgn = 1.0
        else:
            d = z - c0 - p * np.exp(1j * w * t)
            sgn = -1.0
        good = np.abs(d) > 1e-9 * float(np.abs(z).max())
        if good.sum() < 8:
            break
        slope = np.polyfit(t[good], np.unwrap(np.angle(d[good])), 1)[0]
        w_new = sgn * float(slope)
        if not (0.5 * w <= w_new <= 2.0 * w):
            break
        w = w_new
    return w


def _axis_angle(coeffs_n: np.ndarray, n: int) -> float:
    """Orientation of the angular factor from the sign-free squared
    coefficient; returned in [0, pi/n)."""
    phi2 = math.atan2(float(np.mean(coeffs_n ** 2).imag),
                      float(np.mean(coeffs_n ** 2).real))
    theta0 = -phi2 / (2.0 * n)
    span = math.pi / n
    return theta0 % span


def _weighted_norm_sq(diff: np.ndarray, grid: PolarGrid) -> float:
    rf = grid.r_faces
    w = 0.5 * (rf[1:] ** 2 - rf[:-1] ** 2) * grid.dtheta
    return float((diff ** 2 * w[:, None]).sum())


def _interp_frame(times: np.ndarray, frames: np.ndarray, t: float):
    k = int(np.searchsorted(times, t) - 1)
    k = min(max(k, 0), len(times) - 2)
    t0, t1 = times[k], times[k + 1]
    a = (t - t0) / (t1 - t0)
    return (1.0 - a) * frames[k] + a * frames[k + 1]


def symmetry_residual(times: np.ndarray, frames: np.ndarray,
                      grid: PolarGrid, u_star: float, relation: str, *,
                      angle: float = 0.0, time_shift: float = 0.0,
                      n: int | None = None, period: float | None = None,
                      axis: float = 0.0) -> SymmetryShift:
    """Relative L2 residual of one self-similarity relation.

    ``rotation`` compares ``u(theta + angle, t + time_shift)`` with
    ``u(theta, t)``.  ``half-period-rotation`` substitutes
    ``angle = pi/n`` and ``time_shift = period/2``;
    ``half-period-reflection`` instead compares against
    ``u(2 axis - theta - pi/n, t + period/2)`` where ``axis`` orients the
    reflection (0 for a wave in symmetric position).  Rotations snap to
    the nearest grid step (reported); time shifts are linearly
    interpolated between stored frames.
    """
    if relation not in RELATIONS:
        raise ConfigError(f"unknown symmetry relation {relation!r}")
    reflected = False
    if relation == "identity":
        angle = 0.0
        time_shift = 0.0
    elif relation == "half-period-rotation":
        if n is None or period is None:
            raise ConfigError("half-period relations need n and period")
        angle = math.pi / n
        time_shift = 0.5 * period
    elif relation == "half-period-reflection":
        if n is None or period is None:
            raise ConfigError("half-period relations need n and period")
        angle = 2.0 * axis - math.pi / n
        time_shift = 0.5 * period
        reflected = True

    steps = int(round(angle / grid.dtheta))
    angle_used = steps * grid.dtheta
    j = np.arange(grid.n_theta)
    # transformed sample: Tu(theta_j) = u(s*theta_j + angle) with s = -1
    # under reflection
    if reflected:
        index = (-j + steps) % grid.n_theta
    else:
        index = (j + steps) % grid.n_theta

    num = 0.0
    den = 0.0
    t_max = times[-1]
    for k, t in enumerate(times):
        ts = t + time_shift
        if ts > t_max + 1e-9:
            break
        target = _interp_frame(times, frames, min(ts, t_max))
        moved = target[:, index]
        num += _weighted_norm_sq(moved - frames[k], grid)
        den += _weighted_norm_sq(frames[k] - u_star, grid)
    if den == 0.0:
        raise NumericalError("symmetry residual undefined for a zero field")
    return SymmetryShift(value=math.sqrt(num / den),
                         angle_requested=angle, angle_used=angle_used,
                         reflected=reflected, time_shift=time_shift)


def _trim_start(times: np.ndarray, period: float, tau: float) -> int:
    t_skip = max(5.0 * period, 20.0 * tau)
    return int(np.searchsorted(times, times[0] + t_skip))


def classify(times: np.ndarray, frames: np.ndarray, grid: PolarGrid,
             u_star: float, *, tau: float = 0.0,
             config: DiagnosticsConfig | None = None,
             trim: bool = True) -> WaveReport:
    """Classify a trajectory window (see the module docstring).

    ``times``/``frames`` are the stored prey frames of a run.  When
    ``trim`` is set, the first ``max(5 periods, 20 tau)`` are discarded
    (period bootstrapped from the window tail); the remaining window must
    span at least ``config.min_periods`` periods.
    """
    cfg = config or DiagnosticsConfig()
    if len(times) < 8:
        raise ConfigError("too few frames to classify")
    coeffs = band_coefficients(frames, grid, u_star, cfg.band, cfg.n_max)

    n = dominant_wavenumber(coeffs)
    z_full = coeffs[:, n] if n else coeffs[:, 0]
    omega0 = estimate_frequency(times, z_full - z_full.mean())
    period0 = 2.0 * math.pi / omega0

    start = _trim_start(times, period0, tau) if trim else 0
    if len(times) - start < 8:
        raise ConfigError(
            "window too short after transient trimming: "
            f"{len(times) - start} frames remain")
    t = times[start:]
    fr = frames[start:]
    coeffs = coeffs[start:]

    rf = grid.r_faces
    w_cell = 0.5 * (rf[1:] ** 2 - rf[:-1] ** 2) * grid.dtheta
    area = math.pi * grid.R ** 2
    amp_series = np.sqrt(((fr - u_star) ** 2 * w_cell[None, :, None])
                         .sum(axis=(1, 2)) / area)
    amplitude = float(np.sqrt((amp_series ** 2).mean()))

    n = dominant_wavenumber(coeffs)
    z = coeffs[:, n] if n else coeffs[:, 0]
    omega = estimate_frequency(t, z - z.mean())
    period = 2.0 * math.pi / omega
    if t[-1] - t[0] < cfg.min_periods * period:
        raise ConfigError(
            f"window spans {(t[-1] - t[0]) / period:.2f} periods; "
            f"need >= {cfg.min_periods}")

    # settled? fit the trend of per-period mean-square amplitudes — the
    # pointwise series of a standing wave oscillates through zero, so a
    # pointwise log fit would read the fractional leftover period as drift
    n_blocks = int((t[-1] - t[0]) / period)
    edges = t[0] + period * np.arange(n_blocks + 1)
    idx = np.clip(np.searchsorted(edges, t, side="right") - 1, 0,
                  n_blocks - 1)
    block_ms = np.array([np.mean(amp_series[idx == b] ** 2)
                         for b in range(n_blocks)])
    centers = 0.5 * (edges[:-1] + edges[1:])
    slope = float(np.polyfit(centers, np.log(np.maximum(block_ms, 1e-300)),
                             1)[0]) if n_blocks >= 3 else 0.0
    drift_per_period = 0.5 * abs(slope) * period
    (p_plus, p_minus, _), _ = _sideband_fit(t, z, omega)
    sidebands = (float(abs(p_plus)), float(abs(p_minus)))

    details: dict = {"dominant_n": n, "drift_per_period": drift_per_period,
                     "omega": omega}
    residuals: dict[str, float] = {}

    if drift_per_period > cfg.drift_tol:
        return WaveReport("inconclusive", n, period, 0.0, (), residuals,
                          amplitude, sidebands, (float(t[0]), float(t[-1])),
                          details)

    big, small = max(sidebands), min(sidebands)
    tag = "other"
    phase_velocity = 0.0
    axes: tuple[float, ...] = ()

    if n >= 1 and big > 0 and small / big <= cfg.minority_tol:
        # single sideband: rigid rotation; a_n ~ e^{-i n c t} gives the
        # angular phase velocity c from the coefficient's phase drift
        phase = np.unwrap(np.angle(z))
        drift, intercept = np.polyfit(t, phase, 1)
        lin_resid = float(np.sqrt(np.mean(
            (phase - (drift * t + intercept)) ** 2)))
        phase_velocity = -float(drift) / n
        details["phase_fit_rms"] = lin_resid
        if lin_resid < cfg.phase_fit_tol:
            tag = "rotating-ccw" if phase_velocity > 0 else "rotating-cw"
            dt_check = 0.25 * period
            shift = symmetry_residual(
                t, fr, grid, u_star, "rotation",
                angle=phase_velocity * dt_check, time_shift=dt_check)
            residuals["rotation"] = shift.value
    elif n >= 1 and big > 0 and (big - small) / big <= cfg.balance_tol:
        theta0 = _axis_angle(z, n)
        # nodal-axis wobble across thirds of the window
        parts = np.array_split(np.arange(len(t)), 3)
        span = math.pi / n
        angles = [_axis_angle(z[idx], n) for idx in parts if len(idx) > 3]
        wobble = max(abs((a - theta0 + span / 2) % span - span / 2)
                     for a in angles) if angles else 0.0
        details["axis_wobble"] = wobble
        if wobble <= cfg.axis_motion_tol:
            tag = "standing"
            axes = tuple(sorted(
                (theta0 + (0.5 * math.pi + k * math.pi) / n) % math.pi
                for k in range(n)))
            shift = symmetry_residual(t, fr, grid, u_star,
                                      "half-period-rotation", n=n,
                                      period=period)
            residuals["half-period-rotation"] = shift.value

    if tag in ("rotating-ccw", "rotating-cw", "standing"):
        key = next(iter(residuals))
        if residuals[key] > cfg.residual_threshold:
            details["rejected_by_residual"] = residuals[key]
            tag = "other"
            phase_velocity = 0.0
            axes = ()

    return WaveReport(tag, n, period, phase_velocity, axes, residuals,
                      amplitude, sidebands, (float(t[0]), float(t[-1])),
                      details)
