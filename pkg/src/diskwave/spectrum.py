"""Neumann Laplacian eigenstructure of the disk, and quadrature over it.

The linear problem separates in polar coordinates: eigenfunctions of the
Laplacian on the disk of radius ``R`` with zero-flux boundary are

    J_n(beta_{n,m} r / R) * {cos(n theta), sin(n theta)},

where ``beta_{n,m}`` is the m-th positive zero of the derivative ``J_n'``,
with eigenvalue ``lambda = (beta / R)^2``, plus the constant mode with
``lambda = 0``.  Each pair with ``n >= 1`` spans a two-dimensional rotation-
equivariant eigenspace; that degeneracy is what makes rotating and standing
waves coexist at the same bifurcation point.

This module provides Bessel evaluation, reliable tables of ``J_n'`` zeros,
mode objects that know their eigenvalue and their exact L2 normalization
(closed form, no quadrature), Gauss-Legendre radial quadrature, and a full
disk quadrature (Gauss-Legendre in r, uniform trapezoid in theta) for inner
products of sampled fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special
from scipy.optimize import brentq

__all__ = [
    "bessel_j",
    "bessel_j_deriv",
    "neumann_radial_zeros",
    "DiskMode",
    "mode_table",
    "RadialFamily",
    "radial_family",
    "RadialQuadrature",
    "radial_quadrature",
    "DiskQuadrature",
    "disk_quadrature",
]


def bessel_j(n: int, x) -> np.ndarray:
    """Bessel function of the first kind ``J_n`` for integer order ``n >= 0``.

    Vectorized over ``x``.  Orders are restricted to the nonnegative
    integers actually used by the disk problem.
    """
    if n != int(n) or n < 0:
        raise ValueError(f"order must be a nonnegative integer, got {n!r}")
    return special.jv(int(n), x)


def bessel_j_deriv(n: int, x, k: int = 1) -> np.ndarray:
    """k-th derivative of ``J_n`` with respect to its argument."""
    if n != int(n) or n < 0:
        raise ValueError(f"order must be a nonnegative integer, got {n!r}")
    return special.jvp(int(n), x, k)


def neumann_radial_zeros(n: int, count: int) -> np.ndarray:
    """First ``count`` positive zeros of ``J_n'``, in increasing order.

    scipy's zero tables are used for bracketing and every zero is polished
    with a bisection-safe root solve on ``J_n'`` so the result does not
    depend on scipy's internal stopping tolerance.

    Note the convention: for every order, including ``n = 0``, these are the
    *positive* zeros of the derivative.  ``beta = 0`` (which is a zero of
    ``J_0'``) is excluded; the associated eigenfunction is the constant mode
    and is handled separately.
    """
    if count < 1:
        return np.empty(0)
    zeros = special.jnp_zeros(int(n), int(count))
    polished = np.empty_like(zeros)
    for i, z in enumerate(zeros):
        lo, hi = z - 1e-3, z + 1e-3
        flo, fhi = bessel_j_deriv(n, lo), bessel_j_deriv(n, hi)
        if flo == 0.0:
            polished[i] = lo
            continue
        if fhi == 0.0:
            polished[i] = hi
            continue
        if flo * fhi > 0.0:  # extremely unlikely: fall back to the table value
            polished[i] = z
            continue
        polished[i] = brentq(lambda x: bessel_j_deriv(n, x), lo, hi,
                             xtol=1e-14, rtol=8.9e-16)
    return polished


@dataclass(frozen=True)
class DiskMode:
    """One angular-radial mode of the Neumann Laplacian on the disk.

    ``(n, m)`` with ``m >= 1`` is the mode built on the m-th positive zero of
    ``J_n'``; ``(0, 0)`` is the constant mode.  ``beta`` stores the zero
    (``0.0`` for the constant mode) and ``lam`` the Laplacian eigenvalue
    ``(beta/R)^2``, so ``Lap(phi) = -lam * phi`` exactly for every field
    built from this mode's radial profile times an ``n``-harmonic.
    """

    n: int
    m: int
    beta: float
    R: float

    @property
    def lam(self) -> float:
        return (self.beta / self.R) ** 2

    @property
    def is_constant(self) -> bool:
        return self.m == 0

    @property
    def radial_norm_sq(self) -> float:
        """Closed form of ``int_0^R J_n(beta r/R)^2 r dr``.

        For ``beta`` a zero of ``J_n'`` the integral collapses to
        ``(R^2/2) (1 - n^2/beta^2) J_n(beta)^2``; the constant mode gives
        ``R^2/2``.
        """
        if self.is_constant:
            return 0.5 * self.R**2
        jn = float(bessel_j(self.n, self.beta))
        return 0.5 * self.R**2 * (1.0 - self.n**2 / self.beta**2) * jn**2

    @property
    def norm_cos(self) -> float:
        """Amplitude making ``J_n(beta r/R) cos(n theta)`` unit-L2 on the disk.

        The same constant normalizes the sine partner for ``n >= 1``.
        """
        ang = 2.0 * math.pi if self.n == 0 else math.pi
        return 1.0 / math.sqrt(ang * self.radial_norm_sq)

    @property
    def norm_complex(self) -> float:
        """Amplitude making ``J_n(beta r/R) exp(+/- i n theta)`` unit-L2."""
        return 1.0 / math.sqrt(2.0 * math.pi * self.radial_norm_sq)

    def radial_profile(self, r) -> np.ndarray:
        """Unnormalized radial profile ``J_n(beta r / R)`` (``1`` if constant)."""
        r = np.asarray(r, dtype=float)
        if self.is_constant:
            return np.ones_like(r)
        return bessel_j(self.n, self.beta * r / self.R)

    def radial_profile_deriv(self, r) -> np.ndarray:
        """d/dr of :meth:`radial_profile`."""
        r = np.asarray(r, dtype=float)
        if self.is_constant:
            return np.zeros_like(r)
        return (self.beta / self.R) * bessel_j_deriv(self.n, self.beta * r / self.R)


def mode_table(R: float, n_max: int, m_max: int,
               include_constant: bool = True) -> list[DiskMode]:
    """All modes with ``n <= n_max`` and ``m <= m_max``, sorted by eigenvalue.

    Ties (there are none generically) fall back to ``(n, m)`` order.  The
    constant mode ``(0, 0)`` is included first unless disabled.
    """
    if R <= 0:
        raise ValueError(f"R must be positive, got {R!r}")
    if n_max < 0 or m_max < 1:
        raise ValueError("need n_max >= 0 and m_max >= 1")
    modes: list[DiskMode] = []
    if include_constant:
        modes.append(DiskMode(n=0, m=0, beta=0.0, R=R))
    for n in range(n_max + 1):
        zeros = neumann_radial_zeros(n, m_max)
        for m, beta in enumerate(zeros, start=1):
            modes.append(DiskMode(n=n, m=m, beta=float(beta), R=R))
    modes.sort(key=lambda md: (md.lam, md.n, md.m))
    return modes


@dataclass(frozen=True)
class RadialFamily:
    """Orthonormal radial basis for one angular index ``q``.

    The functions are ``J_q(beta_j r/R)`` scaled to be orthonormal under the
    radial measure ``int_0^R f g r dr``; for ``q = 0`` the constant function
    ``sqrt(2)/R`` is prepended (index 0).  ``lam[j]`` is the Laplacian
    eigenvalue of member ``j`` *when paired with any q-harmonic angular
    factor*, so radial solves can treat the Laplacian as the diagonal
    ``-lam``.
    """

    q: int
    R: float
    beta: np.ndarray   # J_q' zeros, 0.0 first for the q=0 constant member
    lam: np.ndarray
    scale: np.ndarray  # 1/sqrt(radial norm^2) per member

    def __len__(self) -> int:
        return len(self.beta)

    def eval(self, r: np.ndarray) -> np.ndarray:
        """Matrix ``[j, i] = member_j(r_i)`` of orthonormalized profiles."""
        r = np.asarray(r, dtype=float)
        out = np.empty((len(self.beta), r.size))
        for j, b in enumerate(self.beta):
            if b == 0.0:
                out[j] = self.scale[j]
            else:
                out[j] = self.scale[j] * bessel_j(self.q, b * r / self.R)
        return out

    def eval_deriv(self, r: np.ndarray) -> np.ndarray:
        """Matrix of d/dr of the orthonormalized profiles."""
        r = np.asarray(r, dtype=float)
        out = np.zeros((len(self.beta), r.size))
        for j, b in enumerate(self.beta):
            if b != 0.0:
                out[j] = self.scale[j] * (b / self.R) * bessel_j_deriv(
                    self.q, b * r / self.R)
        return out


def radial_family(q: int, count: int, R: float) -> RadialFamily:
    """Build the orthonormal radial family for angular index ``q``.

    ``count`` is the number of nonconstant members; for ``q = 0`` the
    constant member is prepended in addition.
    """
    betas = [0.0] if q == 0 else []
    betas.extend(float(b) for b in neumann_radial_zeros(q, count))
    beta = np.array(betas)
    lam = (beta / R) ** 2
    scale = np.empty_like(beta)
    for j, b in enumerate(beta):
        m = j if q == 0 else j + 1  # j = 0 is the constant member only for q = 0
        mode = DiskMode(n=q, m=m, beta=b, R=R)
        scale[j] = 1.0 / math.sqrt(mode.radial_norm_sq)
    return RadialFamily(q=q, R=R, beta=beta, lam=lam, scale=scale)


@dataclass(frozen=True)
class RadialQuadrature:
    """Gauss-Legendre nodes/weights mapped to ``[0, R]``.

    ``integrate(f)`` computes ``int_0^R f(r) dr`` of sampled values;
    ``integrate_radial`` includes the polar area factor ``r``.
    """

    R: float
    r: np.ndarray
    w: np.ndarray

    def integrate(self, values: np.ndarray) -> complex:
        return np.tensordot(values, self.w, axes=([-1], [0]))

    def integrate_radial(self, values: np.ndarray) -> complex:
        return np.tensordot(values, self.w * self.r, axes=([-1], [0]))


def radial_quadrature(R: float, n_nodes: int = 160) -> RadialQuadrature:
    if n_nodes < 1:
        raise ValueError("need at least one node")
    x, w = leggauss(int(n_nodes))
    return RadialQuadrature(R=R, r=0.5 * R * (x + 1.0), w=0.5 * R * w)


@dataclass(frozen=True)
class DiskQuadrature:
    """Tensor quadrature on the disk: Gauss-Legendre radially, uniform
    trapezoid (= rectangle, by periodicity) in angle.

    Fields are sampled on the ``(n_r, n_theta)`` grid ``r[i], theta[j]``.
    The trapezoid rule is exact for trigonometric polynomials of angular
    degree below ``n_theta/2``, which covers every integrand assembled from
    the modal calculations here.  ``theta0`` offsets the angular grid; inner
    products of resolved fields must not depend on it (that invariance is
    part of the test suite).
    """

    radial: RadialQuadrature
    theta: np.ndarray

    @property
    def r(self) -> np.ndarray:
        return self.radial.r

    def grids(self) -> tuple[np.ndarray, np.ndarray]:
        """Broadcastable ``(r[:, None], theta[None, :])`` pair."""
        return self.radial.r[:, None], self.theta[None, :]

    def inner(self, a: np.ndarray, b: np.ndarray) -> complex:
        """L2 inner product ``int a conj(b) r dr dtheta`` of sampled fields."""
        dtheta = 2.0 * math.pi / self.theta.size
        ang = (a * np.conj(b)).sum(axis=1) * dtheta
        return complex(self.radial.integrate_radial(ang))

    def norm(self, a: np.ndarray) -> float:
        return math.sqrt(abs(self.inner(a, a)))

    def mode_field(self, mode: DiskMode,
                   kind: Literal["cos", "sin", "plus", "minus", "const"] = "cos",
                   normalized: bool = True) -> np.ndarray:
        """Sample one (optionally unit-norm) eigenfunction on the grid."""
        r, th = self.grids()
        rad = mode.radial_profile(self.radial.r)[:, None]
        if mode.is_constant or kind == "const":
            amp = 1.0 / math.sqrt(math.pi * mode.R**2) if normalized else 1.0
            return amp * np.ones((self.radial.r.size, self.theta.size))
        if kind == "cos":
            ang = np.cos(mode.n * th)
            amp = mode.norm_cos
        elif kind == "sin":
            ang = np.sin(mode.n * th)
            amp = mode.norm_cos
        elif kind == "plus":
            ang = np.exp(1j * mode.n * th)
            amp = mode.norm_complex
        elif kind == "minus":
            ang = np.exp(-1j * mode.n * th)
            amp = mode.norm_complex
        else:
            raise ValueError(f"unknown kind {kind!r}")
        if not normalized:
            amp = 1.0
        return amp * rad * ang


def disk_quadrature(R: float, n_r: int = 160, n_theta: int = 256,
                    theta0: float = 0.0) -> DiskQuadrature:
    if n_theta < 4:
        raise ValueError("need at least four angular nodes")
    theta = theta0 + 2.0 * math.pi * np.arange(n_theta) / n_theta
    return DiskQuadrature(radial=radial_quadrature(R, n_r), theta=theta)
