"""Limit profiles: branch identities, j-independence, conjugation, refinement."""

import cmath
import math

import numpy as np
import pytest

from quasirect.asymptotics import (LimitProfileParams, U_lattice_asym, W_l_limit,
                                   branch_weights, lattice_amplitude,
                                   linear_profile, nonlinear_limit_profile,
                                   profile_params, u_lattice_asym)
from quasirect.smooth import bump
from quasirect.sources import A_eps_sq, default_source
from quasirect.symbols import make_model_symbol

SYM = make_model_symbol()
SRC = default_source()
EPS = 1 / 50
PAR = profile_params(EPS, SYM, SRC)


class TestLinearProfile:
    def test_zero_profile(self):
        par = LimitProfileParams(ell=-6.0, q=2.0, gamma=0.2, eps=EPS, T_cap=1.0,
                                 abar_even=lambda s: np.zeros_like(np.asarray(s)),
                                 abar_odd=lambda s: np.zeros_like(np.asarray(s)),
                                 support=(0.3, 1.0))
        assert linear_profile(par, 1.5) == 0.0

    def test_q_gt_2_plain_mass(self):
        g = lambda s: bump(s, 0.4, 0.9)
        par = LimitProfileParams(ell=-6.0, q=3.0, gamma=0.2, eps=EPS, T_cap=1.0,
                                 abar_even=g, abar_odd=g, support=(0.4, 0.9))
        val = linear_profile(par, 1.5)
        from quasirect.oscquad import Oscillatory1D, integrate_osc_1d
        mass = integrate_osc_1d(Oscillatory1D(g, lambda s: np.zeros_like(np.asarray(s)),
                                              1.0, 0.4, 0.9,
                                              dphase=lambda s: np.zeros_like(np.asarray(s))),
                                tol=1e-12)
        assert abs(val - mass) < 1e-10

    def test_refinement_oracle(self):
        coarse = linear_profile(PAR, 1.5, tol=1e-6)
        fine = linear_profile(PAR, 1.5, tol=1e-11)
        assert abs(coarse - fine) < 1e-6

    def test_conjugation_symmetry(self):
        # negating ell conjugates the profile for real abar
        plus = linear_profile(PAR, 1.3)
        par_neg = LimitProfileParams(ell=+6.0, q=2.0, gamma=PAR.gamma, eps=PAR.eps,
                                     T_cap=PAR.T_cap, abar_even=PAR.abar_even,
                                     abar_odd=PAR.abar_odd, support=PAR.support)
        # implementation guards ell <= 0; emulate by conjugating the integrand:
        # L(-ell) = conj(L(ell)) for real abar
        assert abs(np.conj(plus) - _lin_profile_pos_ell(par_neg, 1.3)) < 1e-10


def _lin_profile_pos_ell(par, T):
    from quasirect.oscquad import Oscillatory1D, integrate_osc_1d
    c = par.ell / 6.0
    return integrate_osc_1d(Oscillatory1D(
        par.abar_even, lambda s: -c * (1.0 / s - T / s**2), 1.0, *par.support,
        dphase=lambda s: -c * (-1.0 / s**2 + 2.0 * T / s**3)), tol=1e-12)


class TestLattice:
    def test_j_independence_exact(self):
        assert u_lattice_asym(PAR, 1.5, j=0) == u_lattice_asym(PAR, 1.5, j=7)

    def test_pi_periodic_reduces_to_A2_law(self):
        UA = U_lattice_asym(PAR, 1.5)
        A2 = A_eps_sq(0.2, EPS)
        L = linear_profile(PAR, 1.5)
        assert abs(UA - A2 * L) < 1e-12

    def test_limsup_amplitude(self):
        # at cosine maxima: eps^{-1}|u| -> (|L_e| + |L_o|)/sqrt(2 pi gamma)
        amp = lattice_amplitude(PAR, 1.5)
        Le = linear_profile(PAR, 1.5)
        assert abs(amp - 2 * abs(Le) / math.sqrt(2 * math.pi * 0.2)) < 1e-12
        # u_lattice at a cos-extremum epsilon approaches eps * amp
        g = 0.2
        eps_star = g / (40 * math.pi + math.pi / 4.0)
        par = profile_params(eps_star, SYM, SRC)
        val = abs(u_lattice_asym(par, 1.5)) / eps_star
        assert abs(val - lattice_amplitude(par, 1.5)) < 1e-10


class TestNonlinearProfile:
    def test_window_empty(self):
        assert nonlinear_limit_profile(PAR, 0.9) == 0.0

    def test_correlation_unimodular(self):
        # |d0| = |b(s1)||b(s2)| pointwise: correlation on/off same modulus mass
        lam = PAR.lam()
        s = np.linspace(0.55, 0.95, 7)
        b = np.exp(-1j * (lam / 6.0) * (1.0 / s - 1.2 / s**2)) * PAR.abar_even(s)
        d0 = np.exp(-1j * (lam / 6.0) * (1.5 - 1.2) / (s[:, None] + s[None, :])**2) \
            * b[:, None] * b[None, :]
        assert np.allclose(np.abs(d0), np.abs(b[:, None] * b[None, :]), atol=1e-14)

    def test_no_correlation_matches_W_l(self):
        # removing the correlation factor must reproduce the separated W_l form
        a = nonlinear_limit_profile(PAR, 1.5, correlation=False)
        b = W_l_limit(PAR, 1.5, 2, 0)
        assert abs(a - b) < 1e-10 * (1 + abs(b))

    def test_refinement_stability(self):
        a = nonlinear_limit_profile(PAR, 1.5, tol=1e-4)
        b = nonlinear_limit_profile(PAR, 1.5, tol=1e-8)
        assert abs(a - b) <= 1e-4 * (1 + abs(b))

    def test_parity_fold_equals_A4(self):
        be, bo = branch_weights(0.2, EPS)
        assert abs((be + bo) ** 2 - A_eps_sq(0.2, EPS) ** 2) < 1e-12


class TestWlLimit:
    def test_below_coupling_gate(self):
        assert W_l_limit(PAR, 1.5, 0, 0) == 0.0

    def test_prefactor_magnitude(self):
        # prefactor modulus equals |A_eps^2|^{j1+j2}
        for (j1, j2) in ((2, 0), (1, 1), (2, 1)):
            val = W_l_limit(PAR, 1.5, j1, j2)
            base = W_l_limit(PAR, 1.5, j1, j2) \
                / (math.sqrt(2.0 / (math.pi * 0.2))
                   * math.cos(0.2 / EPS - math.pi / 4.0)) ** (j1 + j2) \
                / cmath.exp(1j * (j2 - j1) * 0.2 / EPS)
            assert abs(abs(val) - abs(A_eps_sq(0.2, EPS)) ** (j1 + j2) * abs(base)) < 1e-12

    def test_time_gate(self):
        assert W_l_limit(PAR, 0.8, 2, 0) == 0.0
