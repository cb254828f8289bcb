"""Classifier checks on synthetic trajectories with known wave type.

The fields are built directly on the grid (no simulation), so every
expected quantity — sense of rotation, phase velocity, nodal axes,
period — is known in closed form."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diskwave.errors import ConfigError
from diskwave.simulate import PolarGrid
from diskwave.diagnostics import (DiagnosticsConfig, angular_spectrum,
                                  band_coefficients, dominant_wavenumber,
                                  estimate_frequency, classify,
                                  symmetry_residual)

U_STAR = 4.0
GRID = PolarGrid(24, 64, 10.0)


def _profile(r):
    s = r / GRID.R
    return s ** 2 * (1.0 - s ** 2)


def _make_frames(times, fn):
    r2, th2 = GRID.mesh()
    return np.stack([fn(r2, th2, t) for t in times])


def _rotating(n, c, amp=0.3):
    """u* + amp f(r) cos(n theta - n c t): rigid rotation, velocity c."""
    return lambda r, th, t: U_STAR + amp * _profile(r) * np.cos(
        n * th - n * c * t)


def _standing(n, omega, theta0, amp=0.3):
    return lambda r, th, t: U_STAR + amp * _profile(r) * np.cos(
        omega * t) * np.cos(n * (th - theta0))


# one frame per grid step of rotation: residual checks interpolate exactly
C_GRID = GRID.dtheta / 0.25


# --------------------------------------------------------------------------
# angular spectrum


def test_shift_theorem():
    r2, th2 = GRID.mesh()
    frame = _rotating(2, 0.3)(r2, th2, 1.7)
    a = angular_spectrum(frame, GRID, U_STAR)
    b = angular_spectrum(np.roll(frame, 1, axis=1), GRID, U_STAR)
    ns = np.arange(len(a))
    assert np.allclose(b, a * np.exp(-1j * ns * GRID.dtheta),
                       rtol=0, atol=1e-14)


@settings(max_examples=20, deadline=None)
@given(k=st.integers(min_value=0, max_value=63),
       n=st.integers(min_value=1, max_value=4))
def test_shift_theorem_property(k, n):
    r2, th2 = GRID.mesh()
    frame = _rotating(n, 0.3)(r2, th2, 0.4)
    a = angular_spectrum(frame, GRID, U_STAR)
    b = angular_spectrum(np.roll(frame, k, axis=1), GRID, U_STAR)
    assert abs(b[n] - a[n] * np.exp(-1j * n * k * GRID.dtheta)) < 1e-13


def test_band_must_cover_rings():
    r2, th2 = GRID.mesh()
    frame = _rotating(1, 0.3)(r2, th2, 0.0)
    with pytest.raises(ConfigError):
        angular_spectrum(frame, GRID, U_STAR, band=(0.501, 0.502))


def test_dominant_wavenumber_prefers_structure():
    times = np.arange(40) * 0.3
    fr = _make_frames(times, _rotating(3, 0.4))
    coeffs = band_coefficients(fr, GRID, U_STAR, (0.35, 0.75), 8)
    assert dominant_wavenumber(coeffs) == 3


def test_dominant_wavenumber_axisymmetric():
    times = np.arange(40) * 0.3
    fn = lambda r, th, t: U_STAR + 0.3 * _profile(r) * np.cos(0.4 * t) \
        + 0.001 * _profile(r) * np.cos(th)
    coeffs = band_coefficients(_make_frames(times, fn), GRID, U_STAR,
                               (0.35, 0.75), 8)
    assert dominant_wavenumber(coeffs) == 0


# --------------------------------------------------------------------------
# frequency estimation


def test_frequency_recovery_single_tone():
    t = np.arange(300) * 0.22
    w = 0.317
    z = np.exp(-1j * w * t) * 0.83
    assert estimate_frequency(t, z) == pytest.approx(w, rel=1e-10)


def test_frequency_window_invariance():
    w = 0.41
    t0 = np.arange(400) * 0.2
    z0 = 0.5 * np.exp(1j * (w * t0 + 0.3))
    shift = 37
    w_a = estimate_frequency(t0, z0)
    w_b = estimate_frequency(t0[: len(t0) - shift], z0[shift:])
    assert abs(w_a - w_b) < 1e-9 * w


def test_frequency_standing_mixture():
    t = np.arange(500) * 0.25
    w = 0.39
    z = np.cos(w * t) * np.exp(1j * 0.7)
    assert estimate_frequency(t, z) == pytest.approx(w, rel=1e-8)


# --------------------------------------------------------------------------
# symmetry residuals


def test_identity_residual_is_zero():
    times = np.arange(40) * 0.25
    fr = _make_frames(times, _rotating(1, C_GRID))
    s = symmetry_residual(times, fr, GRID, U_STAR, "identity")
    assert s.value == 0.0
    assert s.time_shift == 0.0


def test_rotation_residual_exact_on_grid_shift():
    times = np.arange(128) * 0.25
    fr = _make_frames(times, _rotating(1, C_GRID))
    # one second advances the pattern by exactly 4 grid steps
    s = symmetry_residual(times, fr, GRID, U_STAR, "rotation",
                          angle=4.0 * GRID.dtheta, time_shift=1.0)
    assert s.value < 1e-13
    assert s.angle_used == s.angle_requested


def test_rotation_angle_snaps_to_grid():
    times = np.arange(40) * 0.25
    fr = _make_frames(times, _rotating(1, C_GRID))
    s = symmetry_residual(times, fr, GRID, U_STAR, "rotation",
                          angle=1.55 * GRID.dtheta, time_shift=0.0)
    assert s.angle_used == pytest.approx(2.0 * GRID.dtheta)


def test_half_period_rotation_standing():
    w = 0.5
    period = 2.0 * math.pi / w
    times = np.arange(256) * 0.25
    fr = _make_frames(times, _standing(2, w, 0.3))
    s = symmetry_residual(times, fr, GRID, U_STAR, "half-period-rotation",
                          n=2, period=period)
    assert s.value < 5e-3          # time interpolation only
    assert s.angle_requested == pytest.approx(math.pi / 2)


def test_half_period_reflection_standing():
    # the mirror axis of cos(n(theta - theta0)) runs through an antinode
    w = 0.5
    period = 2.0 * math.pi / w
    theta0 = 3.0 * GRID.dtheta
    times = np.arange(256) * 0.25
    fr = _make_frames(times, _standing(2, w, theta0))
    s = symmetry_residual(times, fr, GRID, U_STAR, "half-period-reflection",
                          n=2, period=period, axis=theta0)
    assert s.reflected
    assert s.value < 5e-3
    bad = symmetry_residual(times, fr, GRID, U_STAR, "half-period-reflection",
                            n=2, period=period,
                            axis=theta0 + 0.5 * math.pi / 2)
    assert bad.value > 0.5


def test_unknown_relation_rejected():
    times = np.arange(10) * 0.25
    fr = _make_frames(times, _rotating(1, C_GRID))
    with pytest.raises(ConfigError):
        symmetry_residual(times, fr, GRID, U_STAR, "glide")
    with pytest.raises(ConfigError):
        symmetry_residual(times, fr, GRID, U_STAR, "half-period-rotation")


# --------------------------------------------------------------------------
# classification


def test_classify_rotating_ccw():
    times = np.arange(257) * 0.25          # 4 periods at c = C_GRID
    fr = _make_frames(times, _rotating(1, C_GRID))
    rep = classify(times, fr, GRID, U_STAR, trim=False)
    assert rep.classification == "rotating-ccw"
    assert rep.n == 1
    assert rep.phase_velocity == pytest.approx(C_GRID, rel=1e-6)
    assert rep.period == pytest.approx(2.0 * math.pi / C_GRID, rel=1e-6)
    assert rep.residuals["rotation"] < 1e-10
    assert max(rep.sidebands) > 10.0 * min(rep.sidebands)


def test_classify_rotating_cw():
    times = np.arange(257) * 0.25
    fr = _make_frames(times, _rotating(2, -C_GRID))
    rep = classify(times, fr, GRID, U_STAR, trim=False)
    assert rep.classification == "rotating-cw"
    assert rep.n == 2
    assert rep.phase_velocity == pytest.approx(-C_GRID, rel=1e-6)


def test_classify_standing_n1_axes():
    w = 0.5
    theta0 = 0.4
    times = np.arange(320) * 0.25          # ~6.4 periods
    fr = _make_frames(times, _standing(1, w, theta0))
    rep = classify(times, fr, GRID, U_STAR, trim=False)
    assert rep.classification == "standing"
    assert rep.n == 1
    assert rep.period == pytest.approx(2.0 * math.pi / w, rel=1e-6)
    assert len(rep.axis_angles) == 1
    assert rep.axis_angles[0] == pytest.approx(
        (theta0 + 0.5 * math.pi) % math.pi, abs=1e-6)
    assert rep.residuals["half-period-rotation"] < 5e-3
    big, small = max(rep.sidebands), min(rep.sidebands)
    assert (big - small) / big < 1e-6


def test_classify_standing_n2_axes():
    w = 0.5
    theta0 = 0.2
    times = np.arange(320) * 0.25
    fr = _make_frames(times, _standing(2, w, theta0))
    rep = classify(times, fr, GRID, U_STAR, trim=False)
    assert rep.classification == "standing"
    assert rep.n == 2
    want = sorted(((theta0 + (0.5 * math.pi + k * math.pi) / 2) % math.pi
                   for k in range(2)))
    assert np.allclose(sorted(rep.axis_angles), want, atol=1e-6)


def test_classify_growing_amplitude_inconclusive():
    w = 0.5
    times = np.arange(320) * 0.25
    fn = lambda r, th, t: U_STAR + 0.05 * np.exp(0.01 * t) * _profile(r) \
        * np.cos(w * t) * np.cos(th)
    rep = classify(times, _make_frames(times, fn), GRID, U_STAR, trim=False)
    assert rep.classification == "inconclusive"
    assert rep.details["drift_per_period"] > 0.01


def test_classify_rotation_invariance():
    times = np.arange(257) * 0.25
    fr = _make_frames(times, _rotating(1, C_GRID))
    rep = classify(times, fr, GRID, U_STAR, trim=False)
    rep_rot = classify(times, np.roll(fr, 11, axis=2), GRID, U_STAR,
                       trim=False)
    assert rep_rot.classification == rep.classification
    assert abs(rep_rot.period - rep.period) < 1e-9 * rep.period
    assert abs(rep_rot.phase_velocity - rep.phase_velocity) \
        < 1e-9 * abs(rep.phase_velocity)


def test_classify_window_start_invariance():
    w = 0.5
    times = np.arange(420) * 0.25
    fr = _make_frames(times, _standing(1, w, 0.4))
    full = classify(times, fr, GRID, U_STAR, trim=False)
    late = classify(times[70:], fr[70:], GRID, U_STAR, trim=False)
    assert late.classification == full.classification
    assert abs(late.period - full.period) < 1e-9 * full.period
    assert abs(late.axis_angles[0] - full.axis_angles[0]) < 1e-8


def test_classify_trims_transient():
    w = 0.5
    period = 2.0 * math.pi / w
    times = np.arange(0.0, 9.2 * period, 0.25)
    fr = _make_frames(times, _standing(1, w, 0.4))
    rep = classify(times, fr, GRID, U_STAR, trim=True)
    assert rep.window[0] >= 5.0 * period - 0.3
    assert rep.classification == "standing"


def test_classify_too_few_frames():
    times = np.arange(5) * 0.25
    fr = _make_frames(times, _rotating(1, C_GRID))
    with pytest.raises(ConfigError):
        classify(times, fr, GRID, U_STAR, trim=False)


def test_classify_short_window_rejected():
    w = 0.5
    times = np.arange(40) * 0.25           # < 3 periods
    fr = _make_frames(times, _standing(1, w, 0.0))
    with pytest.raises(ConfigError):
        classify(times, fr, GRID, U_STAR, trim=False)


def test_classify_threshold_override():
    times = np.arange(257) * 0.25
    fr = _make_frames(times, _rotating(1, C_GRID))
    cfg = DiagnosticsConfig(residual_threshold=1e-14)
    rep = classify(times, fr, GRID, U_STAR, trim=False, config=cfg)
    assert rep.classification == "other"
    assert "rejected_by_residual" in rep.details
