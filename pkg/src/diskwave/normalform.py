"""Cubic normal form of the delay-induced Hopf bifurcation, per disk mode.

At a critical delay the linearization has a pair of imaginary roots on a
Laplacian eigenspace.  For an angular index ``n >= 1`` that eigenspace is
two-dimensional (cosine/sine pair), so the center subspace is spanned by
time-periodic kernel elements built from either a single complex angular
profile (rotating waves, either chirality) or the fixed-axis combination
(standing waves).  This module reduces the PDE onto one such branch and
returns the cubic coefficient of the reduced oscillation equation

    z' = gamma(tau) z + g21 z |z|^2 + ...,

together with the branch direction and period-trend numbers derived from
it.  The reduction is the classical one: solve for the quadratic
center-manifold corrections at temporal frequencies 0 and twice the
critical one, feed them back into the resonant cubic combination, contract
with the adjoint kernel row vector, and project spatially onto the branch
profile.  The adjoint row is normalized through the delay-aware pairing so
that the linear coefficient of the reduced equation is exactly the root
crossing speed d gamma / d tau; that normalization is what makes ``g21``
comparable across conventions.

All angular integrals are exact (every field in sight is a finite
combination of angular harmonics); radial integrals use Gauss-Legendre.
Quadratic corrections are expanded in the Neumann-Bessel radial families of
the excited angular indices (0 and 2n), truncated at a configurable size.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import ConfigError, NumericalError, ResonanceError
from .linstab import (
    CharCoeffs,
    char_coeffs,
    critical_delays,
    delay_matrix,
    drift_matrix,
    hopf_frequency,
    transversality,
)
from .model import (
    KineticDerivatives,
    ModelParams,
    SteadyState,
    kinetic_derivatives,
    steady_state,
)
from .spectrum import (
    DiskMode,
    RadialFamily,
    neumann_radial_zeros,
    radial_family,
    radial_quadrature,
)

__all__ = [
    "BranchKind",
    "NormalFormOptions",
    "NormalFormResult",
    "normal_form",
    "kernel_vectors",
]

BranchKind = Literal["rotating-cw", "rotating-ccw", "standing",
                     "single-cos", "single-sin"]

_BRANCHES: tuple[str, ...] = ("rotating-cw", "rotating-ccw", "standing",
                              "single-cos", "single-sin")


@dataclass(frozen=True)
class NormalFormOptions:
    """Numerical knobs of the reduction.

    ``family_size`` counts the nonconstant members of each radial expansion
    family (a doubling test on it is part of the acceptance suite);
    ``radial_nodes`` sizes the Gauss-Legendre rule; ``resonance_cond_max``
    bounds the condition number of any per-mode correction solve before the
    point is declared resonant.
    """

    family_size: int = 24
    radial_nodes: int = 192
    resonance_cond_max: float = 1e10
    kernel_residual_tol: float = 1e-12


@dataclass(frozen=True)
class NormalFormResult:
    """Outcome of the reduction on one branch of one mode."""

    n: int
    m: int
    branch: str
    k: int
    lam: float
    omega: float
    tau_c: float
    v1: np.ndarray           # right kernel column (2,)
    v2: np.ndarray           # normalized adjoint row (2,)
    d_gamma: complex         # crossing speed, closed form
    d_gamma_pencil: complex  # crossing speed via the matrix pencil route
    g21: complex
    tau_prime: float         # Re g21 / Re gamma'
    rho_prime: float         # Im(gamma' conj(g21)) / Re gamma'
    norm_S_sq: float
    residuals: dict = field(repr=False, default_factory=dict)
    #: populated only when requested: the adjoint-contracted resonant field
    #: (angular harmonic -> radial samples), the branch profile samples, the
    #: harmonic coefficients, and the radial rule, for projection cross-checks
    fields: dict | None = field(repr=False, default=None)

    @property
    def supercritical(self) -> bool:
        """True when the periodic branch bifurcates into delays beyond the
        critical one (where the uniform state has just destabilized), i.e.
        the geometric branch slope d tau / d(amplitude^2) is positive;
        equivalently ``tau_prime < 0`` in the sign convention used here."""
        return self.tau_prime < 0.0

    @property
    def branch_side(self) -> str:
        return "tau > tau_c" if self.supercritical else "tau < tau_c"

    @property
    def period_exceeds_linear(self) -> bool:
        """True when the wave period exceeds (2 pi / omega) near onset."""
        return self.rho_prime > 0.0


# --------------------------------------------------------------------------
# kernel vectors


def kernel_vectors(cc: CharCoeffs, omega: float, tau_c: float,
                   tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray, complex]:
    """Right kernel column ``V1``, normalized adjoint row ``V2``, and the
    raw delay pairing they were normalized by.

    ``V1 = (1, a21 e^{-i omega tau_c} / (d2 lam + i omega))`` solves
    ``Delta(i omega) V1 = 0`` with ``Delta(gamma) = gamma I - M0 - M1
    e^{-gamma tau}``.  ``V2`` is the left null row, scaled so that the
    delay-aware pairing ``V2 (I + tau_c e^{-i omega tau_c} M1) V1 = 1``;
    with that scaling the reduced equation's linear-in-delay coefficient is
    exactly the crossing speed (a cross-check enforced by callers).
    """
    denom = cc.d2 * cc.lam + 1j * omega
    phase = cmath.exp(-1j * omega * tau_c)
    v1 = np.array([1.0 + 0.0j, cc.a21 * phase / denom])
    v2 = np.array([1.0 + 0.0j, -cc.cross / denom])

    m0, m1 = drift_matrix(cc), delay_matrix(cc)
    delta = (1j * omega * np.eye(2) - m0 - phase * m1)
    if max(np.abs(delta @ v1)) > tol or max(np.abs(v2 @ delta)) > tol:
        raise NumericalError(
            f"kernel residuals exceed {tol}: "
            f"|Delta v1|={max(np.abs(delta @ v1)):.3e}, "
            f"|v2 Delta|={max(np.abs(v2 @ delta)):.3e}")

    pairing = complex(v2 @ (np.eye(2) + tau_c * phase * m1) @ v1)
    if abs(pairing) < 1e-12:
        raise NumericalError("degenerate delay pairing; cannot normalize "
                             "the adjoint kernel row")
    return v1, v2 / pairing, pairing


# --------------------------------------------------------------------------
# elementary fields: finite angular-harmonic combinations with radial samples


@dataclass
class _Comp:
    """Radial samples of one angular harmonic of a two-component field:
    values, radial derivatives, and Laplacian action, per component."""

    u: np.ndarray
    du: np.ndarray
    lap_u: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    lap_v: np.ndarray


@dataclass
class _Elem:
    """A field ``e^{i freq t} sum_k comps[k](r) e^{i k theta}``."""

    freq: float
    comps: dict[int, _Comp]


def _angular_coeffs(branch: str, n: int) -> dict[int, complex]:
    """Harmonic coefficients ``c_k`` of the branch's angular factor.

    The chirality convention: with time factor ``e^{+i omega t}``, the
    harmonic ``e^{+i n theta}`` travels clockwise (pattern angle
    d theta/dt = -omega/n) and ``e^{-i n theta}`` counterclockwise.
    """
    if n == 0:
        if branch not in ("single-cos",):
            raise ConfigError(
                f"branch {branch!r} needs an angular index n >= 1; the "
                "axisymmetric family supports only 'single-cos'")
        return {0: 1.0 + 0.0j}
    if branch == "rotating-cw":
        return {n: 1.0 + 0.0j}
    if branch == "rotating-ccw":
        return {-n: 1.0 + 0.0j}
    if branch == "standing":
        return {n: 0.5 - 0.5j, -n: 0.5 + 0.5j}
    if branch == "single-cos":
        return {n: 0.5 + 0.0j, -n: 0.5 + 0.0j}
    if branch == "single-sin":
        return {n: -0.5j, -n: 0.5j}
    raise ConfigError(f"unknown branch {branch!r}; expected one of {_BRANCHES}")


def _branch_amplitude(branch: str, mode: DiskMode) -> float:
    """Radial amplitude making the branch profile's harmonics unit-norm.

    Rotating branches use the unit-norm complex profile; standing and the
    single cosine/sine profiles use the unit-norm real pair amplitude (the
    standing profile then has squared norm 2 by construction).
    """
    if mode.is_constant:
        return 1.0 / math.sqrt(math.pi * mode.R**2)
    if branch in ("rotating-cw", "rotating-ccw"):
        return mode.norm_complex
    return mode.norm_cos


# --------------------------------------------------------------------------
# bilinear and trilinear forms on elementary fields


def _taxis_div(a: _Comp, ka: int, b: _Comp, kb: int, inv_r_sq: np.ndarray
               ) -> np.ndarray:
    """Radial factor of ``div(a_u grad b_v)`` for harmonics ``ka``, ``kb``."""
    return (a.du * b.dv - (ka * kb) * inv_r_sq * a.u * b.v + a.u * b.lap_v)


def _bilinear(x: _Elem, y: _Elem, kd: KineticDerivatives, tau_c: float,
              inv_r_sq: np.ndarray) -> dict[int, np.ndarray]:
    """Symmetric quadratic form: kinetic Taylor terms plus the taxis term.

    The delayed prey slot of the predator kinetics turns the temporal
    frequency of each argument into a phase ``e^{-i freq tau_c}``.
    """
    ex = cmath.exp(-1j * x.freq * tau_c)
    ey = cmath.exp(-1j * y.freq * tau_c)
    out: dict[int, np.ndarray] = {}
    for kx, cx in x.comps.items():
        for ky, cy in y.comps.items():
            k = kx + ky
            u_term = (kd.f_uu * cx.u * cy.u
                      + kd.f_uv * (cx.u * cy.v + cy.u * cx.v)
                      + kd.f_vv * cx.v * cy.v
                      + kd.chi * (_taxis_div(cx, kx, cy, ky, inv_r_sq)
                                  + _taxis_div(cy, ky, cx, kx, inv_r_sq)))
            v_term = (kd.g_ww * (ex * cx.u) * (ey * cy.u)
                      + kd.g_wv * ((ex * cx.u) * cy.v + (ey * cy.u) * cx.v)
                      + kd.g_vv * cx.v * cy.v)
            block = np.vstack([u_term, v_term])
            if k in out:
                out[k] = out[k] + block
            else:
                out[k] = block
    return out


def _trilinear(x: _Elem, y: _Elem, z: _Elem, kd: KineticDerivatives,
               tau_c: float) -> dict[int, np.ndarray]:
    """Symmetric cubic form of the kinetics (the taxis term is quadratic
    only: the advective flux is bilinear in the deviation and contributes
    nothing at third order)."""
    ex = cmath.exp(-1j * x.freq * tau_c)
    ey = cmath.exp(-1j * y.freq * tau_c)
    ez = cmath.exp(-1j * z.freq * tau_c)
    out: dict[int, np.ndarray] = {}
    for kx, cx in x.comps.items():
        for ky, cy in y.comps.items():
            for kz, cz in z.comps.items():
                k = kx + ky + kz
                u_term = (kd.f_uuu * cx.u * cy.u * cz.u
                          + kd.f_uuv * (cx.u * cy.u * cz.v
                                        + cx.u * cy.v * cz.u
                                        + cx.v * cy.u * cz.u)
                          + kd.f_uvv * (cx.u * cy.v * cz.v
                                        + cx.v * cy.u * cz.v
                                        + cx.v * cy.v * cz.u))
                v_term = (kd.g_www * (ex * cx.u) * (ey * cy.u) * (ez * cz.u)
                          + kd.g_wwv * ((ex * cx.u) * (ey * cy.u) * cz.v
                                        + (ex * cx.u) * cy.v * (ez * cz.u)
                                        + cx.v * (ey * cy.u) * (ez * cz.u))
                          + kd.g_wvv * ((ex * cx.u) * cy.v * cz.v
                                        + cx.v * (ey * cy.u) * cz.v
                                        + cx.v * cy.v * (ez * cz.u)))
                block = np.vstack([u_term, v_term])
                if k in out:
                    out[k] = out[k] + block
                else:
                    out[k] = block
    return out


# --------------------------------------------------------------------------
# quadratic center-manifold corrections


class _FamilyWorkspace:
    """Radial family for one |angular index| with cached sample matrices."""

    def __init__(self, q: int, options: NormalFormOptions, R: float,
                 r: np.ndarray, w_radial: np.ndarray) -> None:
        self.family: RadialFamily = radial_family(q, options.family_size, R)
        self.values = self.family.eval(r)          # (J, Nq)
        self.derivs = self.family.eval_deriv(r)    # (J, Nq)
        self.weights = w_radial                    # GL weight * r
        self.lam = self.family.lam

    def project(self, samples: np.ndarray) -> tuple[np.ndarray, float]:
        """Coefficients of (2, Nq) samples in the family, plus the relative
        L2 truncation residual of the reconstruction."""
        coeffs = np.einsum("ck,jk,k->cj", samples, self.values, self.weights)
        recon = coeffs @ self.values
        num = np.einsum("ck,k->", np.abs(samples - recon) ** 2, self.weights)
        den = np.einsum("ck,k->", np.abs(samples) ** 2, self.weights)
        resid = math.sqrt(num / den) if den > 0 else 0.0
        return coeffs, resid


def _solve_correction(source: dict[int, np.ndarray], freq_multiple: int,
                      omega: float, tau_c: float, cc_builder,
                      workspaces: dict[int, _FamilyWorkspace],
                      options: NormalFormOptions,
                      label: str) -> tuple[dict[int, np.ndarray], dict]:
    """Invert the linearization at temporal frequency ``freq_multiple *
    omega`` against ``-source``, one radial family member at a time.

    Returns per-angular-index coefficient arrays of shape (2, J) and a
    diagnostics dict (solve residual, worst condition number, truncation
    residual).
    """
    nu = freq_multiple * omega
    phase = cmath.exp(-1j * nu * tau_c)
    coeffs_out: dict[int, np.ndarray] = {}
    worst_cond = 0.0
    worst_solve = 0.0
    worst_trunc = 0.0
    for k, samples in source.items():
        ws = workspaces[abs(k)]
        q_coeffs, trunc = ws.project(samples)
        worst_trunc = max(worst_trunc, trunc)
        sol = np.empty_like(q_coeffs)
        for j in range(q_coeffs.shape[1]):
            cc = cc_builder(float(ws.lam[j]))
            mat = np.array(
                [[cc.a11 - cc.d1 * cc.lam - 1j * nu, -cc.cross],
                 [cc.a21 * phase, -cc.d2 * cc.lam - 1j * nu]])
            cond = np.linalg.cond(mat)
            worst_cond = max(worst_cond, cond)
            if not np.isfinite(cond) or cond > options.resonance_cond_max:
                raise ResonanceError(
                    f"{label}: correction solve at angular index {k}, radial "
                    f"member {j} (eigenvalue {ws.lam[j]:.6g}) is resonant: "
                    f"condition number {cond:.3e} exceeds "
                    f"{options.resonance_cond_max:.1e}")
            rhs = -q_coeffs[:, j]
            sol[:, j] = np.linalg.solve(mat, rhs)
            worst_solve = max(worst_solve,
                              float(np.max(np.abs(mat @ sol[:, j] - rhs))))
        coeffs_out[k] = sol
    diag = {f"{label}_cond_max": worst_cond,
            f"{label}_solve_residual": worst_solve,
            f"{label}_truncation_residual": worst_trunc}
    return coeffs_out, diag


def _correction_elem(coeffs: dict[int, np.ndarray], freq_multiple: int,
                     omega: float,
                     workspaces: dict[int, _FamilyWorkspace]) -> _Elem:
    """Materialize a correction field (samples/derivatives/Laplacians) from
    its per-family coefficients."""
    comps: dict[int, _Comp] = {}
    for k, c in coeffs.items():
        ws = workspaces[abs(k)]
        vals = c @ ws.values
        ders = c @ ws.derivs
        laps = (c * (-ws.lam)[None, :]) @ ws.values
        comps[k] = _Comp(u=vals[0], du=ders[0], lap_u=laps[0],
                         v=vals[1], dv=ders[1], lap_v=laps[1])
    return _Elem(freq=float(freq_multiple) * omega, comps=comps)


# --------------------------------------------------------------------------
# main entry


def normal_form(p: ModelParams, n: int, m: int, *,
                branch: BranchKind = "rotating-cw", k: int = 0,
                options: NormalFormOptions | None = None,
                kinetics: KineticDerivatives | None = None,
                ss: SteadyState | None = None,
                keep_fields: bool = False) -> NormalFormResult:
    """Reduce the bifurcation on mode ``(n, m)`` to its cubic coefficient.

    ``branch`` picks the kernel convention (rotating of either chirality,
    fixed-axis standing, or a single cosine/sine profile kept for
    cross-checks).  ``k`` picks the critical delay (k-th crossing).
    ``kinetics`` may override the Taylor coefficients (used by validation
    tests); by default they are computed from ``p``.

    Raises :class:`ResonanceError` when a correction solve is singular to
    working precision and :class:`NumericalError` when a residual gate
    fails.
    """
    if options is None:
        options = NormalFormOptions()
    if branch not in _BRANCHES:
        raise ConfigError(f"unknown branch {branch!r}; expected one of "
                          f"{_BRANCHES}")
    if n < 0 or (m < 1 and not (n == 0 and m == 0)):
        raise ConfigError(f"invalid mode ({n}, {m})")
    if ss is None:
        ss = steady_state(p)
    kd = kinetics if kinetics is not None else kinetic_derivatives(p, ss)

    if m == 0:
        mode = DiskMode(n=0, m=0, beta=0.0, R=p.R)
    else:
        beta = float(neumann_radial_zeros(n, m)[-1])
        mode = DiskMode(n=n, m=m, beta=beta, R=p.R)
    lam = mode.lam

    cc = char_coeffs(p, lam, ss=ss)
    omega = hopf_frequency(cc)
    if omega is None:
        raise NumericalError(
            f"mode ({n}, {m}) has no imaginary characteristic root at these "
            "parameters (no delay-induced oscillation)")
    tau_c = float(critical_delays(cc, omega, k)[k])
    d_gamma = transversality(cc, omega, tau_c)

    v1, v2, raw_pairing = kernel_vectors(cc, omega, tau_c,
                                         tol=options.kernel_residual_tol)

    # pencil route for the crossing speed: gamma' = -m_tau / m_gamma with
    # m_gamma normalized to 1 by construction of v2
    m1 = delay_matrix(cc)
    phase_c = cmath.exp(-1j * omega * tau_c)
    m_gamma = complex(v2 @ (np.eye(2) + tau_c * phase_c * m1) @ v1)
    m_tau = complex(1j * omega * phase_c * (v2 @ m1 @ v1))
    d_gamma_pencil = -m_tau / m_gamma

    # radial machinery
    rq = radial_quadrature(p.R, options.radial_nodes)
    r = rq.r
    w_radial = rq.w * r
    inv_r_sq = 1.0 / (r * r)

    amp = _branch_amplitude(branch, mode)
    prof = amp * mode.radial_profile(r)
    dprof = amp * mode.radial_profile_deriv(r)
    lap_prof = -lam * prof

    c_ang = _angular_coeffs(branch, n)
    psi_comps: dict[int, _Comp] = {}
    psibar_comps: dict[int, _Comp] = {}
    for kk, ck in c_ang.items():
        psi_comps[kk] = _Comp(
            u=ck * v1[0] * prof, du=ck * v1[0] * dprof,
            lap_u=ck * v1[0] * lap_prof,
            v=ck * v1[1] * prof, dv=ck * v1[1] * dprof,
            lap_v=ck * v1[1] * lap_prof)
        cbar = np.conj(ck)
        psibar_comps[-kk] = _Comp(
            u=cbar * np.conj(v1[0]) * prof, du=cbar * np.conj(v1[0]) * dprof,
            lap_u=cbar * np.conj(v1[0]) * lap_prof,
            v=cbar * np.conj(v1[1]) * prof, dv=cbar * np.conj(v1[1]) * dprof,
            lap_v=cbar * np.conj(v1[1]) * lap_prof)
    psi = _Elem(freq=omega, comps=psi_comps)
    psibar = _Elem(freq=-omega, comps=psibar_comps)

    # excited angular indices: 0 and 2n (and their negatives)
    needed_families = sorted({abs(ka + kb) for ka in c_ang for kb in
                              list(c_ang) + [-kk for kk in c_ang]})
    workspaces = {q: _FamilyWorkspace(q, options, p.R, r, w_radial)
                  for q in needed_families}

    def cc_builder(lam_j: float) -> CharCoeffs:
        return char_coeffs(p, lam_j, ss=ss)

    # quadratic sources and corrections
    q20 = _bilinear(psi, psi, kd, tau_c, inv_r_sq)
    q11 = _bilinear(psi, psibar, kd, tau_c, inv_r_sq)
    w20_coeffs, diag20 = _solve_correction(
        q20, 2, omega, tau_c, cc_builder, workspaces, options, "w20")
    w11_coeffs, diag11 = _solve_correction(
        q11, 0, omega, tau_c, cc_builder, workspaces, options, "w11")
    w20 = _correction_elem(w20_coeffs, 2, omega, workspaces)
    w11 = _correction_elem(w11_coeffs, 0, omega, workspaces)

    # resonant cubic combination
    cubic = _trilinear(psi, psi, psibar, kd, tau_c)
    mix11 = _bilinear(psi, w11, kd, tau_c, inv_r_sq)
    mix20 = _bilinear(psibar, w20, kd, tau_c, inv_r_sq)

    resonant: dict[int, np.ndarray] = {}
    for term, factor in ((cubic, 1.0), (mix11, 2.0), (mix20, 1.0)):
        for kk, block in term.items():
            if kk in resonant:
                resonant[kk] = resonant[kk] + factor * block
            else:
                resonant[kk] = factor * block

    # contraction with the adjoint row, then spatial projection onto S
    contracted_all = {kk: v2[0] * block[0] + v2[1] * block[1]
                      for kk, block in resonant.items()}
    num = 0.0 + 0.0j
    norm_s_sq = 0.0
    for kk, ck in c_ang.items():
        norm_s_sq += (2.0 * math.pi * abs(ck) ** 2
                      * float(np.dot(w_radial, prof * prof)))
        if kk in contracted_all:
            radial_overlap = complex(np.dot(w_radial, contracted_all[kk] * prof))
            num += 2.0 * math.pi * np.conj(ck) * radial_overlap
    g21 = num / (m_gamma * norm_s_sq)

    tau_prime = g21.real / d_gamma.real
    rho_prime = (d_gamma * np.conj(g21)).imag / d_gamma.real

    residuals = {
        "kernel_pairing": abs(m_gamma - 1.0),
        "d_gamma_route_reldiff": abs(d_gamma - d_gamma_pencil) / abs(d_gamma),
        "raw_pairing_abs": abs(raw_pairing),
        **diag20, **diag11,
    }
    fields = None
    if keep_fields:
        fields = {"contracted": contracted_all, "profile": prof,
                  "harmonics": dict(c_ang), "r": r, "w_radial": w_radial,
                  "m_gamma": m_gamma,
                  # slaved quadratic fields, per angular index, sampled on
                  # r: the settled wave carries (z^2/2) w20 e^{2 i omega t}
                  # + |z|^2 w11 (+ conjugates) on top of the kernel part
                  "w20": {kk: (w20.comps[kk].u.copy(), w20.comps[kk].v.copy())
                          for kk in w20.comps},
                  "w11": {kk: (w11.comps[kk].u.copy(), w11.comps[kk].v.copy())
                          for kk in w11.comps}}
    return NormalFormResult(
        n=n, m=m, branch=branch, k=k, lam=lam, omega=omega, tau_c=tau_c,
        v1=v1, v2=v2, d_gamma=d_gamma, d_gamma_pencil=d_gamma_pencil,
        g21=g21, tau_prime=float(tau_prime), rho_prime=float(rho_prime),
        norm_S_sq=float(norm_s_sq), residuals=residuals, fields=fields)
