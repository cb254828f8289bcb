"""Linear stability of the uniform state, one Laplacian mode at a time.

Linearizing about the coexistence state and projecting onto a Laplacian
eigenmode with eigenvalue ``lam`` turns the PDE into a planar linear
delay system ``x'(t) = M0 x(t) + M1 x(t - tau)`` with

    M0 = [[a11 - d1 lam, -(chi u* lam + d)], [0, -d2 lam]],
    M1 = [[0, 0], [a21, 0]],

whose characteristic function is the scalar

    Gamma(gamma) = gamma^2 + A gamma + B exp(-gamma tau) + C,
    A = (d1 + d2) lam - a11,
    B = a21 (chi u* lam + d),
    C = (d1 lam - a11) d2 lam.

This module evaluates that function, finds purely imaginary roots (Hopf
candidates), the critical delays where they occur, and the crossing speed
of the root through the imaginary axis, and offers root polishing /
continuation and an argument-principle root counter used to audit the
stability claims numerically.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .model import ModelParams, SteadyState, steady_state

__all__ = [
    "CharCoeffs",
    "char_coeffs",
    "char_value",
    "char_deriv",
    "drift_matrix",
    "delay_matrix",
    "char_matrix",
    "hopf_frequency",
    "critical_phase",
    "critical_delays",
    "transversality",
    "taxis_threshold",
    "newton_root",
    "track_root",
    "count_roots_rectangle",
    "ModeHopf",
    "mode_hopf",
    "CurvePoint",
    "crossing_eigenvalue_bound",
    "scan_hopf_curves",
]

#: Residual gate applied to every computed imaginary root.
_IMAG_ROOT_TOL = 1e-10


@dataclass(frozen=True)
class CharCoeffs:
    """Coefficients of the per-mode characteristic function.

    ``cross`` stores ``chi u* lam + d`` (the prey equation's total
    sensitivity to the predator mode, taxis plus predation), which reappears
    in the kernel eigenvectors.
    """

    lam: float
    A: float
    B: float
    C: float
    cross: float
    a11: float
    a21: float
    d1: float
    d2: float


def char_coeffs(p: ModelParams, lam: float,
                ss: SteadyState | None = None) -> CharCoeffs:
    """Characteristic coefficients for the mode with eigenvalue ``lam``."""
    if lam < 0:
        raise ValueError(f"Laplacian mode eigenvalue must be >= 0, got {lam!r}")
    if ss is None:
        ss = steady_state(p)
    cross = p.chi * ss.u_star * lam + p.d
    return CharCoeffs(
        lam=lam,
        A=(p.d1 + p.d2) * lam - ss.a11,
        B=ss.a21 * cross,
        C=(p.d1 * lam - ss.a11) * p.d2 * lam,
        cross=cross,
        a11=ss.a11,
        a21=ss.a21,
        d1=p.d1,
        d2=p.d2,
    )


def char_value(gamma: complex, cc: CharCoeffs, tau: float) -> complex:
    """``Gamma(gamma) = gamma^2 + A gamma + B e^(-gamma tau) + C``."""
    return gamma * gamma + cc.A * gamma + cc.B * cmath.exp(-gamma * tau) + cc.C


def char_deriv(gamma: complex, cc: CharCoeffs, tau: float) -> complex:
    """d Gamma / d gamma at fixed ``tau``."""
    return 2.0 * gamma + cc.A - tau * cc.B * cmath.exp(-gamma * tau)


def drift_matrix(cc: CharCoeffs) -> np.ndarray:
    """Instantaneous part ``M0`` of the per-mode linear delay system."""
    return np.array([[cc.a11 - cc.d1 * cc.lam, -cc.cross],
                     [0.0, -cc.d2 * cc.lam]])


def delay_matrix(cc: CharCoeffs) -> np.ndarray:
    """Delayed part ``M1`` of the per-mode linear delay system."""
    return np.array([[0.0, 0.0], [cc.a21, 0.0]])


def char_matrix(gamma: complex, cc: CharCoeffs, tau: float) -> np.ndarray:
    """Matrix form ``gamma I - M0 - M1 e^(-gamma tau)``; its determinant is
    :func:`char_value` (a test asserts that identity)."""
    return (gamma * np.eye(2, dtype=complex) - drift_matrix(cc)
            - cmath.exp(-gamma * tau) * delay_matrix(cc))


def hopf_frequency(cc: CharCoeffs) -> float | None:
    """Frequency ``omega* > 0`` of a purely imaginary characteristic root.

    Substituting ``gamma = i omega`` and separating real and imaginary
    parts eliminates the delay and leaves a quadratic in ``omega^2``::

        omega^4 + (A^2 - 2C) omega^2 + (C^2 - B^2) = 0.

    A unique positive solution exists iff ``C^2 - B^2 < 0`` (then the
    product of the two ``omega^2`` roots is negative, so exactly one is
    positive); this function returns ``None`` otherwise.  When
    ``C^2 - B^2 >= 0`` but ``2C - A^2 > B``-ish configurations produce two
    positive roots, multiple crossing pairs exist; that regime falls outside
    the single-crossing analysis supported here and also returns ``None``.

    For this model under the feasibility conditions, ``C >= 0`` on every
    mode, so ``C^2 < B^2`` and ``C < B`` are equivalent tests; both appear
    as flags on :class:`ModeHopf`.
    """
    disc = cc.C * cc.C - cc.B * cc.B
    if disc >= 0.0:
        return None
    a2 = cc.A * cc.A - 2.0 * cc.C
    omega_sq = 0.5 * (-a2 + math.sqrt(a2 * a2 - 4.0 * disc))
    return math.sqrt(omega_sq)


def critical_phase(cc: CharCoeffs, omega: float) -> float:
    """Phase ``theta0`` in ``(0, 2 pi]`` of the first critical delay.

    At ``gamma = i omega`` the characteristic equation forces
    ``e^(-i omega tau) = -((C - omega^2) + i A omega)/B``, i.e.
    ``cos(omega tau) = (omega^2 - C)/B`` and ``sin(omega tau) =
    A omega / B``; ``theta0`` is that angle reduced to ``(0, 2 pi]`` (the
    branch with ``theta0 = 2 pi`` rather than ``0``, so the first critical
    delay is strictly positive).
    """
    theta = math.atan2(cc.A * omega / cc.B, (omega * omega - cc.C) / cc.B)
    if theta <= 0.0:
        theta += 2.0 * math.pi
    return theta


def critical_delays(cc: CharCoeffs, omega: float, k_max: int) -> np.ndarray:
    """Delays ``tau_k = (theta0 + 2 pi k)/omega`` for ``k = 0..k_max``."""
    theta0 = critical_phase(cc, omega)
    ks = np.arange(k_max + 1)
    taus = (theta0 + 2.0 * math.pi * ks) / omega
    for t in taus:
        resid = abs(char_value(1j * omega, cc, float(t)))
        if resid > _IMAG_ROOT_TOL:
            raise NumericalError(
                f"imaginary-root residual {resid:.3e} exceeds "
                f"{_IMAG_ROOT_TOL} at tau={t}")
    return taus


def transversality(cc: CharCoeffs, omega: float, tau: float) -> complex:
    """Speed ``d gamma / d tau`` of the root crossing at ``gamma = i omega``.

    Implicit differentiation of ``Gamma(gamma(tau), tau) = 0`` gives::

        gamma' = gamma B e^(-gamma tau) / (2 gamma + A - tau B e^(-gamma tau)).
    """
    gamma = 1j * omega
    be = cc.B * cmath.exp(-gamma * tau)
    denom = 2.0 * gamma + cc.A - tau * be
    if abs(denom) < 1e-14:
        raise NumericalError("degenerate crossing: d Gamma/d gamma vanishes")
    return gamma * be / denom


def taxis_threshold(cc_at_chi0: CharCoeffs, u_star: float, d: float) -> float:
    """Smallest taxis strength for which the mode admits a Hopf pair.

    ``B`` grows linearly in ``chi`` while ``C`` is chi-independent, so the
    condition ``B > C`` (equivalently ``C^2 - B^2 < 0`` when ``C >= 0``)
    becomes ``chi > ((C / a21) - d) / (u* lam)``; clipped at zero because
    negative thresholds mean the mode oscillates already without taxis.
    For the uniform mode (``lam = 0``) the threshold is zero (``C = 0`` and
    ``B = a21 d > 0`` regardless of ``chi``).
    """
    if cc_at_chi0.lam == 0.0:
        return 0.0
    chi_star = ((cc_at_chi0.C / cc_at_chi0.a21) - d) / (u_star * cc_at_chi0.lam)
    return max(0.0, chi_star)


def newton_root(cc: CharCoeffs, tau: float, gamma0: complex,
                tol: float = 1e-13, max_iter: int = 60) -> complex:
    """Polish a characteristic root by Newton iteration from ``gamma0``."""
    gamma = complex(gamma0)
    for _ in range(max_iter):
        f = char_value(gamma, cc, tau)
        if abs(f) < tol:
            return gamma
        df = char_deriv(gamma, cc, tau)
        if df == 0:
            break
        step = f / df
        gamma -= step
        if abs(step) < 1e-16 * max(1.0, abs(gamma)):
            f = char_value(gamma, cc, tau)
            if abs(f) < math.sqrt(tol):
                return gamma
    f = char_value(gamma, cc, tau)
    if abs(f) < 1e-9:
        return gamma
    raise NumericalError(
        f"characteristic-root Newton failed: residual {abs(f):.3e} "
        f"from start {gamma0}")


def track_root(cc: CharCoeffs, taus: np.ndarray, gamma0: complex) -> np.ndarray:
    """Continue one characteristic root along a sequence of delays.

    Each step seeds Newton with the previous root; steps must be small
    enough that the branch is followed without jumping (the callers use
    dense grids).  Used both by tests (as an independent check on
    :func:`transversality`) and by the root-tracking CLI output.
    """
    out = np.empty(len(taus), dtype=complex)
    gamma = complex(gamma0)
    for i, tau in enumerate(taus):
        gamma = newton_root(cc, float(tau), gamma)
        out[i] = gamma
    return out


def count_roots_rectangle(cc: CharCoeffs, tau: float,
                          re_range: tuple[float, float],
                          im_range: tuple[float, float],
                          base_points_per_edge: int = 400) -> int:
    """Number of characteristic roots inside an axis-aligned rectangle.

    Integrates the winding number of ``Gamma`` along the boundary by
    summing principal-branch phase increments, bisecting any segment whose
    increment exceeds ``pi/2`` (so phase jumps cannot be missed).  Raises
    :class:`NumericalError` if a root (numerically) touches the contour.
    """
    re0, re1 = re_range
    im0, im1 = im_range
    if not (re1 > re0 and im1 > im0):
        raise ValueError("empty rectangle")
    corners = [complex(re0, im0), complex(re1, im0),
               complex(re1, im1), complex(re0, im1), complex(re0, im0)]
    total = 0.0
    for z0, z1 in zip(corners[:-1], corners[1:]):
        ts = np.linspace(0.0, 1.0, base_points_per_edge + 1)
        pts = [z0 + (z1 - z0) * t for t in ts]
        vals = [char_value(z, cc, tau) for z in pts]
        i = 0
        depth = 0
        while i < len(pts) - 1:
            v0, v1 = vals[i], vals[i + 1]
            if abs(v0) < 1e-12 or abs(v1) < 1e-12:
                raise NumericalError("characteristic root on the counting contour")
            dphi = cmath.phase(v1 / v0)
            if abs(dphi) > 0.5 * math.pi:
                mid = 0.5 * (pts[i] + pts[i + 1])
                if abs(mid - pts[i]) < 1e-13:
                    raise NumericalError(
                        "phase increment will not resolve; root too close "
                        "to the counting contour")
                pts.insert(i + 1, mid)
                vals.insert(i + 1, char_value(mid, cc, tau))
                continue
            total += dphi
            i += 1
    winding = total / (2.0 * math.pi)
    count = round(winding)
    if abs(winding - count) > 1e-6:
        raise NumericalError(f"non-integer winding number {winding!r}")
    return int(count)


@dataclass(frozen=True)
class ModeHopf:
    """Hopf data of one Laplacian mode at fixed model parameters.

    ``omega`` is the crossing frequency, ``tau_crit[k]`` the k-th critical
    delay, and ``d_gamma[k]`` the complex crossing speed there.  The two
    equivalent forms of the crossing-existence test are recorded as flags
    (they agree for every feasible parameter set; a test enforces that).
    """

    n: int
    m: int
    lam: float
    coeffs: CharCoeffs
    omega: float
    theta0: float
    tau_crit: np.ndarray
    d_gamma: np.ndarray
    linear_test: bool      # C - B < 0
    quadratic_test: bool   # C^2 - B^2 < 0

    @property
    def tau0(self) -> float:
        return float(self.tau_crit[0])


def mode_hopf(p: ModelParams, n: int, m: int, lam: float,
              k_max: int = 0, ss: SteadyState | None = None) -> ModeHopf | None:
    """Assemble the Hopf data for one mode; ``None`` if no imaginary root."""
    cc = char_coeffs(p, lam, ss=ss)
    omega = hopf_frequency(cc)
    if omega is None:
        return None
    taus = critical_delays(cc, omega, k_max)
    d_gamma = np.array([transversality(cc, omega, float(t)) for t in taus])
    return ModeHopf(
        n=n, m=m, lam=lam, coeffs=cc, omega=omega,
        theta0=critical_phase(cc, omega),
        tau_crit=taus, d_gamma=d_gamma,
        linear_test=(cc.C - cc.B < 0.0),
        quadratic_test=(cc.C * cc.C - cc.B * cc.B < 0.0),
    )


@dataclass(frozen=True)
class CurvePoint:
    """One (taxis strength, mode, crossing) sample of the critical-delay
    curve family."""

    chi: float
    n: int
    m: int
    k: int
    lam: float
    omega: float
    tau: float
    d_gamma: complex

    @property
    def transversality_sign(self) -> int:
        return 1 if self.d_gamma.real > 0 else -1


def crossing_eigenvalue_bound(p: ModelParams,
                              ss: SteadyState | None = None) -> float:
    """Largest Laplacian eigenvalue that can carry an imaginary-axis root.

    ``A^2 - 2C = (d1 lam - a11)^2 + (d2 lam)^2 > 0`` always, so the
    frequency equation has a positive solution exactly when ``B > C``
    (both are nonnegative here).  ``B - C`` is a downward parabola in the
    eigenvalue with a positive value at zero, so crossings exist on
    ``[0, lam_plus]`` with ``lam_plus`` its positive root — beyond it the
    quadratic diffusive damping in ``C`` wins for good.
    """
    if ss is None:
        ss = steady_state(p)
    qa = p.d1 * p.d2
    qb = ss.a21 * p.chi * ss.u_star + ss.a11 * p.d2
    qc = ss.a21 * p.d
    return float((qb + math.sqrt(qb * qb + 4.0 * qa * qc)) / (2.0 * qa))


def scan_hopf_curves(p: ModelParams, chi_values, *, k_max: int = 0,
                     lam_cap_factor: float = 50.0) -> tuple[list[CurvePoint],
                                                            dict]:
    """Critical delays of every crossing mode over a taxis-strength grid.

    The mode table is sized from the analytic crossing bound
    (:func:`crossing_eigenvalue_bound`) times ``lam_cap_factor``, so the
    scan verifies the absence of further crossings over a wide margin
    instead of assuming it.  Returns the points plus a truncation record
    (realized eigenvalue cap, table size) for the run metadata.
    """
    from .spectrum import neumann_radial_zeros

    chi_values = [float(c) for c in chi_values]
    ss = steady_state(p)
    lam_plus = max(crossing_eigenvalue_bound(p.with_(chi=c), ss)
                   for c in chi_values)
    lam_cap = lam_cap_factor * lam_plus
    beta_cap = math.sqrt(lam_cap) * p.R

    modes: list[tuple[float, int, int]] = [(0.0, 0, 0)]   # (lam, n, m)
    n = 0
    while True:
        count = max(2, int((beta_cap - n) / math.pi) + 2)
        zeros = neumann_radial_zeros(n, count)
        if zeros[0] > beta_cap:
            if n > 0:
                break
            n += 1
            continue
        for m, beta in enumerate(zeros, start=1):
            if beta > beta_cap:
                break
            modes.append((float((beta / p.R) ** 2), n, m))
        n += 1
    modes.sort()

    points: list[CurvePoint] = []
    for chi in chi_values:
        p_chi = p.with_(chi=chi)
        lam_hopf_max = 0.0
        for lam, n, m in modes:
            if (lam_hopf_max > 0.0
                    and lam > lam_cap_factor * lam_hopf_max):
                break
            mh = mode_hopf(p_chi, n, m, lam, k_max=k_max, ss=ss)
            if mh is None:
                continue
            lam_hopf_max = max(lam_hopf_max, lam)
            for k, (tk, dg) in enumerate(zip(mh.tau_crit, mh.d_gamma)):
                points.append(CurvePoint(
                    chi=chi, n=n, m=m, k=k, lam=lam,
                    omega=mh.omega, tau=float(tk), d_gamma=complex(dg)))

    truncation = {
        "crossing_eigenvalue_bound": lam_plus,
        "eigenvalue_cap": lam_cap,
        "cap_factor": lam_cap_factor,
        "modes_scanned": len(modes),
    }
    return points, truncation
