"""Cubic reduction: kernel gates, symmetry identities, oracle comparisons."""

import math

import numpy as np
import pytest

from diskwave.errors import ConfigError, NumericalError, ResonanceError
from diskwave.linstab import char_coeffs, critical_delays, hopf_frequency
from diskwave.model import KineticDerivatives, kinetic_derivatives
from diskwave.normalform import (
    NormalFormOptions,
    kernel_vectors,
    normal_form,
)


@pytest.fixture(scope="module")
def nf_case1_rot(case1):
    return normal_form(case1, 1, 1, branch="rotating-cw")


@pytest.fixture(scope="module")
def nf_case1_standing(case1):
    return normal_form(case1, 1, 1, branch="standing")


class TestKernel:
    def test_kernel_residuals(self, case1):
        cc = char_coeffs(case1, (1.8411837813406593 / 10.0) ** 2)
        omega = hopf_frequency(cc)
        tau_c = float(critical_delays(cc, omega, 0)[0])
        v1, v2, raw = kernel_vectors(cc, omega, tau_c)
        from diskwave.linstab import char_matrix
        delta = char_matrix(1j * omega, cc, tau_c)
        assert np.max(np.abs(delta @ v1)) < 1e-12
        assert np.max(np.abs(v2 @ delta)) < 1e-12
        assert abs(raw) > 1e-3  # far from a degenerate pairing

    def test_pairing_normalized(self, nf_case1_rot):
        assert nf_case1_rot.residuals["kernel_pairing"] < 1e-12

    def test_crossing_speed_two_routes_agree(self, nf_case1_rot):
        assert nf_case1_rot.residuals["d_gamma_route_reldiff"] < 1e-10

    def test_correction_solves_clean(self, nf_case1_rot):
        assert nf_case1_rot.residuals["w20_solve_residual"] < 1e-10
        assert nf_case1_rot.residuals["w11_solve_residual"] < 1e-10


class TestSymmetryIdentities:
    def test_chirality_mirror_equality(self, case1, nf_case1_rot):
        ccw = normal_form(case1, 1, 1, branch="rotating-ccw")
        assert ccw.g21 == pytest.approx(nf_case1_rot.g21, rel=1e-12)
        assert ccw.tau_prime == pytest.approx(nf_case1_rot.tau_prime, rel=1e-12)

    def test_axis_choice_equality(self, case1):
        a = normal_form(case1, 1, 1, branch="single-cos")
        b = normal_form(case1, 1, 1, branch="single-sin")
        assert b.g21 == pytest.approx(a.g21, rel=1e-12)

    def test_standing_is_twice_single_axis(self, case1, nf_case1_standing):
        # cos + sin = sqrt(2) cos(n theta - pi/4): the standing profile is a
        # rotated, sqrt(2)-scaled single-axis profile, and the cubic
        # coefficient scales with the squared kernel amplitude
        single = normal_form(case1, 1, 1, branch="single-cos")
        assert nf_case1_standing.g21 == pytest.approx(2.0 * single.g21,
                                                      rel=1e-10)

    def test_norms(self, nf_case1_rot, nf_case1_standing):
        assert nf_case1_rot.norm_S_sq == pytest.approx(1.0, rel=1e-12)
        assert nf_case1_standing.norm_S_sq == pytest.approx(2.0, rel=1e-12)


class TestOracles:
    def test_pure_cubic_overlap(self, case1):
        # oracle: tests/oracles/pure_cubic_overlap.py ->
        #   pure-cubic g21 = 8.064784981235057e-06 + 4.821763497228636e-05j
        kd = kinetic_derivatives(case1)
        pure = KineticDerivatives(
            f_uu=0.0, f_uv=0.0, f_vv=0.0, f_uuu=kd.f_uuu, f_uuv=kd.f_uuv,
            f_uvv=0.0, g_ww=0.0, g_wv=0.0, g_vv=0.0, g_www=kd.g_www,
            g_wwv=kd.g_wwv, g_wvv=0.0, chi=0.0)
        r = normal_form(case1, 1, 1, branch="rotating-cw", kinetics=pure)
        expected = 8.064784981235057e-06 + 4.821763497228636e-05j
        assert abs(r.g21 - expected) / abs(expected) < 1e-8

    def test_truncation_doubling(self, case1, nf_case1_standing):
        small = normal_form(case1, 1, 1, branch="standing",
                            options=NormalFormOptions(family_size=12,
                                                      radial_nodes=128))
        rel = abs(small.g21 - nf_case1_standing.g21) / abs(nf_case1_standing.g21)
        assert rel < 1e-4

    def test_grid_projection_rotation_invariance(self, case1):
        # rebuild the projection integrals on explicit polar grids with two
        # different angular offsets; both must reproduce the analytic g21
        res = normal_form(case1, 1, 1, branch="standing", keep_fields=True)
        f = res.fields
        r = f["r"]
        w = f["w_radial"]
        for theta0 in (0.0, 0.37):
            n_theta = 64
            theta = theta0 + 2.0 * math.pi * np.arange(n_theta) / n_theta
            field2d = np.zeros((r.size, n_theta), dtype=complex)
            s2d = np.zeros_like(field2d)
            for kk, samples in f["contracted"].items():
                field2d += samples[:, None] * np.exp(1j * kk * theta)[None, :]
            for kk, ck in f["harmonics"].items():
                s2d += ck * f["profile"][:, None] * np.exp(1j * kk * theta)[None, :]
            dtheta = 2.0 * math.pi / n_theta
            inner = np.einsum("ij,ij,i->", field2d, np.conj(s2d),
                              w) * dtheta
            norm_sq = np.einsum("ij,ij,i->", s2d, np.conj(s2d), w).real * dtheta
            g21_grid = inner / (f["m_gamma"] * norm_sq)
            assert abs(g21_grid - res.g21) / abs(res.g21) < 1e-10


class TestBranchPredictions:
    def test_case1_signs(self, nf_case1_rot, nf_case1_standing):
        # recorded cross-check values report negative tau'(0) and positive
        # rho'(0) on both branches: waves emerge beyond the critical delay
        # with periods above the linear one
        for res in (nf_case1_rot, nf_case1_standing):
            assert res.tau_prime < 0
            assert res.rho_prime > 0
            assert res.supercritical
            assert res.branch_side == "tau > tau_c"
            assert res.period_exceeds_linear

    def test_case2_signs(self, case2):
        for branch in ("rotating-cw", "standing"):
            res = normal_form(case2, 2, 1, branch=branch)
            assert res.tau_prime < 0
            assert res.rho_prime > 0

    def test_derived_quantities_consistent(self, nf_case1_rot):
        r = nf_case1_rot
        assert r.tau_prime == pytest.approx(r.g21.real / r.d_gamma.real,
                                            rel=1e-12)
        assert r.rho_prime == pytest.approx(
            (r.d_gamma * np.conj(r.g21)).imag / r.d_gamma.real, rel=1e-12)

    def test_axisymmetric_mode_reduces(self, case1):
        res = normal_form(case1, 0, 1, branch="single-cos")
        assert res.lam > 0
        assert np.isfinite(res.g21.real) and np.isfinite(res.g21.imag)

    def test_uniform_mode_reduces(self, case1):
        res = normal_form(case1, 0, 0, branch="single-cos")
        assert res.lam == 0.0
        assert np.isfinite(abs(res.g21))


class TestValidation:
    def test_rejects_unknown_branch(self, case1):
        with pytest.raises(ConfigError):
            normal_form(case1, 1, 1, branch="spiral")

    def test_rejects_rotating_axisymmetric(self, case1):
        with pytest.raises(ConfigError):
            normal_form(case1, 0, 1, branch="rotating-cw")

    def test_no_crossing_raises(self, case1):
        # remove taxis on a stiff mode: no imaginary root to reduce at
        with pytest.raises(NumericalError):
            normal_form(case1.with_(chi=0.0), 1, 3)

    def test_resonance_guard_trips(self, case1):
        with pytest.raises(ResonanceError):
            normal_form(case1, 1, 1,
                        options=NormalFormOptions(resonance_cond_max=1.0))
