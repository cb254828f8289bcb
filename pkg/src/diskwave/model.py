"""Kinetics and equilibrium structure of a delayed predator-prey taxis model.

The model tracks a prey density ``u(x, t)`` and a predator density
``v(x, t)`` on a disk of radius ``R`` with no-flux boundaries::

    u_t = d1 Lap(u) + chi div(u grad v) + u (1 - u/K) - alpha u v / (u + 1)
    v_t = d2 Lap(v) - d v + alpha u(t - tau) v / (u(t - tau) + 1)

Prey grow logistically with carrying capacity ``K``, are consumed through a
saturating functional response with capture rate ``alpha``, and drift down
predator gradients with taxis strength ``chi`` (the sign convention above
makes positive ``chi`` repulsive for prey).  Predators die at rate ``d`` and
reproduce from prey captured a time ``tau`` earlier.

This module owns everything local in state space: the coexistence steady
state, the feasibility conditions that make it biologically meaningful and
linearly stable without delay, and the Taylor coefficients of the kinetics
at the steady state that feed the linear and weakly nonlinear analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

__all__ = [
    "ModelParams",
    "SteadyState",
    "FeasibilityReport",
    "KineticDerivatives",
    "prey_kinetics",
    "predator_kinetics",
    "steady_state",
    "check_feasibility",
    "kinetic_derivatives",
]


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the model.

    Attributes
    ----------
    d1, d2 : float
        Prey and predator diffusivities (positive).
    chi : float
        Prey-taxis strength (nonnegative).
    alpha : float
        Capture/conversion rate of the functional response (positive).
    K : float
        Prey carrying capacity (positive).
    d : float
        Predator death rate (positive).  ``alpha > d`` is required for a
        positive coexistence state but is checked by :func:`steady_state`,
        not here, so that parameter sets can be constructed freely.
    tau : float
        Maturation delay (nonnegative).
    R : float
        Disk radius (positive).
    """

    d1: float
    d2: float
    chi: float
    alpha: float
    K: float
    d: float
    tau: float
    R: float

    def __post_init__(self) -> None:
        positive = {"d1": self.d1, "d2": self.d2, "alpha": self.alpha,
                    "K": self.K, "d": self.d, "R": self.R}
        for name, value in positive.items():
            if not (value > 0.0) or not math.isfinite(value):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        for name, value in (("chi", self.chi), ("tau", self.tau)):
            if value < 0.0 or not math.isfinite(value):
                raise ValueError(f"{name} must be nonnegative and finite, got {value!r}")

    def with_(self, **changes: float) -> "ModelParams":
        """Return a copy with the given fields replaced."""
        return replace(self, **changes)


def prey_kinetics(u, v, p: ModelParams):
    """Local prey growth term: logistic growth minus saturating predation.

    Accepts scalars or numpy arrays.
    """
    return u * (1.0 - u / p.K) - p.alpha * u * v / (u + 1.0)


def predator_kinetics(u_delayed, v, p: ModelParams):
    """Local predator term: death plus conversion of delayed prey capture.

    ``u_delayed`` is the prey density evaluated a time ``tau`` in the past.
    Accepts scalars or numpy arrays.
    """
    return -p.d * v + p.alpha * u_delayed * v / (u_delayed + 1.0)


@dataclass(frozen=True)
class SteadyState:
    """Spatially uniform coexistence equilibrium and its linearization.

    ``a11`` and ``a21`` are the partial derivatives of the kinetics at the
    equilibrium that drive the linear problem.  ``a12`` (the prey equation's
    sensitivity to predators) equals ``-d`` exactly — the saturating response
    evaluated at the equilibrium prey level is ``d/alpha`` by definition of
    that level.  The predator equation has zero sensitivity to its own
    density at equilibrium.
    """

    u_star: float
    v_star: float
    a11: float
    a21: float
    a12: float


def steady_state(p: ModelParams) -> SteadyState:
    """Coexistence equilibrium of the kinetics, with its Jacobian entries.

    Solves ``predator_kinetics = 0`` for the prey level and then
    ``prey_kinetics = 0`` for the predator level::

        u* = d / (alpha - d),
        v* = (K - u*) (1 + u*) / (K alpha).

    Raises
    ------
    ValueError
        If ``alpha <= d`` (no positive prey equilibrium) or ``u* >= K``
        (predator level would be nonpositive).
    """
    if p.alpha <= p.d:
        raise ValueError(
            f"no positive equilibrium: alpha={p.alpha} must exceed d={p.d}")
    u_star = p.d / (p.alpha - p.d)
    if u_star >= p.K:
        raise ValueError(
            f"equilibrium prey level u*={u_star} is not below the carrying "
            f"capacity K={p.K}; the predator level would be nonpositive")
    v_star = (p.K - u_star) * (1.0 + u_star) / (p.K * p.alpha)
    # a11 = d(prey)/du = 1 - 2u*/K - alpha v*/(1+u*)^2, which simplifies to
    # u* (K - 1 - 2u*) / (K (1 + u*)); the direct form is kept for clarity.
    a11 = 1.0 - 2.0 * u_star / p.K - p.alpha * v_star / (1.0 + u_star) ** 2
    a21 = p.alpha * v_star / (1.0 + u_star) ** 2
    return SteadyState(u_star=u_star, v_star=v_star, a11=a11, a21=a21, a12=-p.d)


@dataclass(frozen=True)
class FeasibilityReport:
    """Truth values for the conditions that make the no-delay problem a
    stable coexistence state with active taxis.

    Attributes
    ----------
    carrying_capacity_below_threshold : bool
        ``0 < K < 1 + 2 u*``; equivalent to ``a11 < 0`` (prey self-limitation
        wins at the equilibrium).
    predation_exceeds_mortality : bool
        ``alpha > d``; needed for a positive prey equilibrium.
    prey_level_below_capacity : bool
        ``0 < u* < K``; needed for a positive predator equilibrium.
    taxis_active : bool
        ``chi > 0``.
    """

    carrying_capacity_below_threshold: bool
    predation_exceeds_mortality: bool
    prey_level_below_capacity: bool
    taxis_active: bool

    @property
    def all_hold(self) -> bool:
        return (self.carrying_capacity_below_threshold
                and self.predation_exceeds_mortality
                and self.prey_level_below_capacity
                and self.taxis_active)


def check_feasibility(p: ModelParams) -> FeasibilityReport:
    """Evaluate each feasibility clause by direct substitution.

    The clauses are evaluated independently: a false
    ``predation_exceeds_mortality`` does not short-circuit the others (the
    equilibrium expressions are still well defined as formulas whenever
    ``alpha != d``).
    """
    if p.alpha == p.d:
        raise ValueError("alpha == d leaves the equilibrium formulas undefined")
    u_star = p.d / (p.alpha - p.d)
    return FeasibilityReport(
        carrying_capacity_below_threshold=(0.0 < p.K < 1.0 + 2.0 * u_star),
        predation_exceeds_mortality=(p.alpha > p.d),
        prey_level_below_capacity=(0.0 < u_star < p.K),
        taxis_active=(p.chi > 0.0),
    )


@dataclass(frozen=True)
class KineticDerivatives:
    """Second- and third-order Taylor coefficients of the kinetics at the
    coexistence state, plus the taxis coefficient.

    Prey kinetics ``f(u, v)`` is differentiated in the instantaneous prey
    variable ``u`` and predator variable ``v``.  Predator kinetics
    ``g(w, v)`` is differentiated in the delayed prey variable ``w`` and the
    instantaneous ``v``.  All mixed derivatives not listed vanish
    identically (``f`` and ``g`` are linear in ``v``).
    """

    f_uu: float
    f_uv: float
    f_vv: float
    f_uuu: float
    f_uuv: float
    f_uvv: float
    g_ww: float
    g_wv: float
    g_vv: float
    g_www: float
    g_wwv: float
    g_wvv: float
    chi: float


def kinetic_derivatives(p: ModelParams, ss: SteadyState | None = None) -> KineticDerivatives:
    """Closed-form Taylor coefficients of the kinetics at the equilibrium.

    With ``s = 1 + u*`` the nonzero coefficients are::

        f_uu  = -2/K + 2 alpha v* / s^3      f_uv  = -alpha / s^2
        f_uuu = -6 alpha v* / s^4            f_uuv = 2 alpha / s^3
        g_ww  = -2 alpha v* / s^3            g_wv  = alpha / s^2
        g_www = 6 alpha v* / s^4             g_wwv = -2 alpha / s^3

    (every derivative with two or more ``v``'s vanishes).  The saturating
    response makes ``g``'s pure-``w`` derivatives the exact negatives of the
    corresponding predation part of ``f``'s.
    """
    if ss is None:
        ss = steady_state(p)
    s = 1.0 + ss.u_star
    av = p.alpha * ss.v_star
    return KineticDerivatives(
        f_uu=-2.0 / p.K + 2.0 * av / s**3,
        f_uv=-p.alpha / s**2,
        f_vv=0.0,
        f_uuu=-6.0 * av / s**4,
        f_uuv=2.0 * p.alpha / s**3,
        f_uvv=0.0,
        g_ww=-2.0 * av / s**3,
        g_wv=p.alpha / s**2,
        g_vv=0.0,
        g_www=6.0 * av / s**4,
        g_wwv=-2.0 * p.alpha / s**3,
        g_wvv=0.0,
        chi=p.chi,
    )
