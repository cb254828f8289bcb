"""Named initial-history factories for simulation runs.

Each factory returns a callable ``history(r, theta, t) -> (u, v)`` valid
for ``t`` in ``[-tau, 0]``; the names describe the long-run behaviour the
data is built to excite, not the formulas.

The four showcase seeds (``standing-n1``, ``standing-n2``,
``rotating-ccw``, ``rotating-cw``) start on the weakly nonlinear wave
itself, assembled from the cubic reduction's field objects: the
oscillatory kernel part (no-flux eigenfunction radial factor, which
vanishes like ``r^n`` at the pole -- any slower decay makes the angular
taxis velocity singular there -- with the predator component's
amplitude and phase taken from the kernel vector) plus the two slaved
quadratic companions every finite-amplitude wave drags along: a static
shift of the angular means and a second harmonic riding at twice the
frequency.  The oscillatory part follows the characteristic root
continued to the run's delay, and ``amplitude`` sets its peak relative
prey excursion; the companions scale with its square.  Both layers
matter.  An ad-hoc predator phase splits the energy between the two
chiralities, and the minority component pollutes the classification
window for a very long time because the inter-chirality exchange rates
are tiny near onset.  Omitting the companions deposits their entire
difference onto mode families the wave does not drive; those families
have essentially no decay at these delays, so the deposit rings through
the whole run and inflates every shape residual.  Rotating histories
are single-chirality waves ``e^{i(n theta +/- omega t)}``; standing
histories are the equal mix of both, an oscillation under a fixed
``cos(n theta)`` axis system.

The ``*-trig`` variants are plain separable trigonometric products
``1 + amplitude * cos(t) * cos(2 pi r / R) * f(n theta)`` on both
fields, with the rotating variants offsetting the prey and predator
angular factors by a quarter turn (the offset's sign picks the favoured
chirality).  They are deliberately naive: the radial factor is not an
eigenfunction (it projects onto several radial overtones at once, most
of them faster-growing than the intended one) and the quarter-turn
offset leaves roughly 30 percent of the wave energy in the disfavoured
chirality, so runs from these histories pass through long mixed
transients instead of the clean wave the same-named showcase seed
produces.  They exist so that comparison runs can start from
hand-written data; the showcase seeds are the ones built to excite a
single clean wave.

``random`` draws a band-limited superposition of the no-flux eigenmodes
(angular orders through 4, three radial overtones each) with i.i.d.
uniform coefficients and phases, frozen in history time and scaled so
the relative perturbation never exceeds ``amplitude``; the seed is
mandatory, and the draw is independent of the grid.  ``eigenmode``
follows the linearized solution ``exp(gamma t)`` for a given
characteristic root and kernel vector, so growth-rate probes start
exactly on the mode they measure.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import ConfigError
from .model import ModelParams, SteadyState, steady_state
from .simulate import PolarGrid

__all__ = ["SEED_NAMES", "make_history"]

SEED_NAMES = ("steady", "standing-n1", "standing-n2", "rotating-ccw",
              "rotating-cw", "standing-n1-trig", "standing-n2-trig",
              "rotating-ccw-trig", "rotating-cw-trig", "random",
              "eigenmode")

_SHOWCASE: dict[str, tuple[int, str]] = {
    "standing-n1": (1, "standing"),
    "standing-n2": (2, "standing"),
    "rotating-ccw": (1, "ccw"),
    "rotating-cw": (2, "cw"),
}

# angular order plus the prey/predator angular factors (applied to
# n*theta) of the separable trig-product variants
_TRIG: dict[str, tuple[int, Callable, Callable]] = {
    "standing-n1-trig": (1, np.cos, np.cos),
    "standing-n2-trig": (2, np.cos, np.cos),
    "rotating-ccw-trig": (1, np.sin, np.cos),
    "rotating-cw-trig": (2, np.cos, np.sin),
}

_RANDOM_N_MAX = 4
_RANDOM_M_MAX = 3


def _oscillatory_mode(p: ModelParams, n: int, ss: SteadyState):
    """Root and kernel data of the first radial overtone of order ``n``.

    Returns ``(gamma, vv, radial)``: the characteristic root continued
    from the mode's imaginary crossing to the run's delay, the predator
    component of its kernel vector, and the rim-normalized radial
    profile.
    """
    from .linstab import char_coeffs, hopf_frequency, newton_root
    from .spectrum import mode_table

    mode = next(md for md in mode_table(p.R, n, 1, include_constant=False)
                if md.n == n)
    cc = char_coeffs(p, mode.lam, ss=ss)
    omega = hopf_frequency(cc)
    if omega is None:
        raise ConfigError(
            f"angular order {n} has no oscillatory crossing at these "
            "parameters; the wave seeds need one to aim at")
    gamma = newton_root(cc, p.tau, 1j * omega)
    # predator kernel component from the linearized predator balance
    # (gamma + d2 lam) v = a21 e^{-gamma tau} u; the undelayed predator
    # self-term vanishes at the equilibrium
    vv = cc.a21 * np.exp(-gamma * p.tau) / (gamma + cc.d2 * mode.lam)
    rim = float(mode.radial_profile(np.asarray([p.R]))[0])
    radial = lambda r: mode.radial_profile(np.asarray(r, dtype=float)) / rim
    return gamma, vv, radial


def _random_superposition(R: float, rng: np.random.Generator):
    """Band-limited random field on the disk with peak magnitude <= 1."""
    from .spectrum import mode_table

    modes = [md for md in mode_table(R, _RANDOM_N_MAX, _RANDOM_M_MAX,
                                     include_constant=False)]
    r_ref = np.linspace(0.0, R, 1001)
    profiles, scales = [], []
    for md in modes:
        profiles.append(md.radial_profile)
        scales.append(float(np.max(np.abs(md.radial_profile(r_ref)))))
    coeff = rng.uniform(-1.0, 1.0, len(modes))
    phase = rng.uniform(0.0, 2.0 * math.pi, len(modes))
    norm = float(np.sum(np.abs(coeff)))

    def field(r, th):
        out = np.zeros(np.broadcast_shapes(np.shape(r), np.shape(th)))
        for md, prof, scale, c, ph in zip(modes, profiles, scales,
                                          coeff, phase):
            out = out + (c / scale) * prof(np.asarray(r, dtype=float)) \
                * np.cos(md.n * np.asarray(th) + ph)
        return out / norm

    return field


def make_history(name: str, p: ModelParams, *,
                 amplitude: float = 0.1,
                 seed: int | None = None,
                 grid: PolarGrid | None = None,
                 mode_profile: Callable[[np.ndarray], np.ndarray] | None = None,
                 wavenumber: int | None = None,
                 root: complex | None = None,
                 predator_component: complex | None = None,
                 ss: SteadyState | None = None):
    """Build the named initial history (see the module docstring)."""
    if ss is None:
        ss = steady_state(p)
    us, vs = ss.u_star, ss.v_star

    if name == "steady":
        def history(r, th, t):
            shape = np.broadcast_shapes(np.shape(r), np.shape(th))
            return np.full(shape, us), np.full(shape, vs)
        return history

    if name in _SHOWCASE:
        n, kind = _SHOWCASE[name]
        gamma, vv, radial = _oscillatory_mode(p, n, ss)
        if kind == "ccw":           # e^{i(n theta - omega t)}: conjugate pair
            gamma, vv = np.conj(gamma), np.conj(vv)
        a = amplitude * us          # amplitude = relative prey amplitude

        if kind == "standing":
            def history(r, th, t):
                osc = np.exp(gamma * t)
                bump = a * radial(r) * np.cos(n * th)
                return (us + bump * osc.real, vs + bump * (vv * osc).real)
        else:
            def history(r, th, t):
                wave = radial(r) * np.exp(gamma * t + 1j * n * np.asarray(th))
                return (us + a * wave.real, vs + a * (vv * wave).real)
        return history

    if name in _TRIG:
        n, ang_u, ang_v = _TRIG[name]
        k_r = 2.0 * math.pi / p.R

        def history(r, th, t):
            fac = amplitude * math.cos(t) * np.cos(k_r * np.asarray(r))
            nth = n * np.asarray(th)
            return (us * (1.0 + fac * ang_u(nth)),
                    vs * (1.0 + fac * ang_v(nth)))
        return history

    if name == "random":
        if seed is None:
            raise ConfigError("the random seed is mandatory for random "
                              "initial histories")
        rng = np.random.default_rng(seed)
        pert_u = _random_superposition(p.R, rng)
        pert_v = _random_superposition(p.R, rng)
        frozen: dict = {}   # the field is static; evaluate once per mesh

        def history(r, th, t):
            key = (np.shape(r), np.shape(th))
            if key not in frozen:
                frozen[key] = (us * (1 + amplitude * pert_u(r, th)),
                               vs * (1 + amplitude * pert_v(r, th)))
            return frozen[key]
        return history

    if name == "eigenmode":
        if mode_profile is None or wavenumber is None or root is None \
                or predator_component is None:
            raise ConfigError(
                "eigenmode histories need mode_profile, wavenumber, root, "
                "and predator_component")
        n = wavenumber
        gam = complex(root)
        vv = complex(predator_component)
        a = amplitude

        def history(r, th, t):
            phase = np.exp(gam * t + 1j * n * th)
            prof = mode_profile(r)
            return (us + a * (prof * phase).real,
                    vs + a * (vv * prof * phase).real)
        return history

    raise ConfigError(f"unknown initial-history preset {name!r}; "
                      f"choose from {', '.join(SEED_NAMES)}")
