"""Phase, profiles, multipliers, resonance amplitude."""

import math

import numpy as np
import pytest

from quasirect.sources import (A_eps, A_eps_sq, PhaseParams, ProfileSpec,
                               default_source, phase_eval, phase_grad)


class TestPhase:
    def test_zero_at_t0(self):
        for x in (-3.0, 0.0, 7.2):
            assert phase_eval(0.2, 0.0, x) == 0.0

    def test_x_derivative_is_minus_t(self):
        _, dx = phase_grad(0.2, 7.0, 0.3)
        assert float(dx) == -7.0

    def test_value_at_2pi(self):
        # cos(2 pi) - 1 = 0
        assert abs(float(phase_eval(0.2, 2 * math.pi, 0.0)) - 2 * math.pi) < 1e-14

    def test_t_derivative(self):
        g, t, x = 0.2, 1.3, 0.05
        dt, _ = phase_grad(g, t, x)
        h = 1e-7
        fd = (phase_eval(g, t + h, x) - phase_eval(g, t - h, x)) / (2 * h)
        assert abs(float(dt) - float(fd)) < 1e-8

    def test_gamma_range_enforced(self):
        with pytest.raises(ValueError):
            PhaseParams(gamma=0.3)


class TestResonanceAmplitude:
    def test_closed_form_at_quarter_pi(self):
        # gamma/eps = pi/4: A^2 = sqrt(10/pi) e^{-i pi/4}, |A^2| ~ 1.784124
        g = 0.2
        eps = g / (math.pi / 4.0)
        val = A_eps_sq(g, eps)
        ref = math.sqrt(10.0 / math.pi) * np.exp(-1j * math.pi / 4.0)
        assert abs(val - ref) < 1e-14
        assert abs(abs(val) - 1.784124) < 1e-6

    def test_cosine_zero(self):
        g = 0.2
        eps = g / (3.0 * math.pi / 4.0)
        assert abs(A_eps_sq(g, eps)) < 1e-14

    def test_bound_and_limsup(self):
        g = 0.2
        bound = math.sqrt(2.0 / (math.pi * g))
        # dense grid including exact maximizers of |cos|
        ns = np.arange(3, 2000)
        eps_peak = g / (ns * math.pi)          # gamma/eps = n pi: |cos| = 1/sqrt2... no:
        eps_max = g / (ns * math.pi + math.pi / 4.0)   # cos(...) = cos(n pi) = +-1
        vals = [abs(A_eps_sq(g, e)) for e in np.concatenate([
            np.geomspace(1e-4, 0.02, 4000), eps_max])]
        assert max(vals) <= bound + 1e-12
        assert max(vals) >= bound - 1e-3

    def test_A_eps_squares_back(self):
        g, eps = 0.2, 1 / 77.0
        assert abs(A_eps(g, eps) ** 2 - A_eps_sq(g, eps)) < 1e-14


class TestProfiles:
    src = default_source()

    def test_support_space(self):
        prof = self.src.profile
        assert float(self.src.a_m(1, 0.7, 20.0, prof.r + 0.01)) == 0.0
        assert float(self.src.a_m(1, 0.7, 20.0, -prof.r - 0.01)) == 0.0

    def test_support_long_time(self):
        prof = self.src.profile
        assert float(self.src.a_m(1, prof.T_cap + 0.01, 20.0, 0.0)) == 0.0

    def test_support_fast_time(self):
        assert float(self.src.a_m(1, 0.7, 0.99, 0.0)) == 0.0

    def test_a1_equals_abar_past_ts_exactly(self):
        # for t >= t_s the ramp saturates at exactly 1.0: a_1 == abar bitwise
        prof = self.src.profile
        for t in (prof.t_s, prof.t_s + 0.7, prof.t_s + 11.0):
            lhs = self.src.a_m(1, 0.7, t, 0.02)
            rhs = self.src.abar(0.7, t, 0.02)
            assert float(lhs) == float(rhs)

    def test_periodization(self):
        # shifting by n*period reproduces abar up to the 1-ulp rounding of
        # the shifted argument (exact over the reals)
        prof = self.src.profile
        t = prof.t_s + 1.0
        for n in range(1, 4):
            lhs = self.src.a_m(1, 0.7, t + n * prof.period, 0.02)
            rhs = self.src.abar(0.7, t, 0.02)
            assert abs(float(lhs) - float(rhs)) < 5e-15

    def test_smoothness_proxy_bounded_differences(self):
        # 4th-order differences converge (a jump would scale like h^-4:
        # halving h would multiply the proxy by 16)
        prof = self.src.profile

        def fd4_max(n):
            T = np.linspace(prof.T_lo - 0.1, prof.T_cap + 0.1, n)
            th = prof.theta(T)
            h = T[1] - T[0]
            d = th
            for _ in range(4):
                d = np.diff(d) / h
            return np.max(np.abs(d))

        a, b = fd4_max(2001), fd4_max(4001)
        assert b < 3.0 * a

    def test_r_range_enforced(self):
        with pytest.raises(ValueError):
            ProfileSpec(r=0.11, gamma=0.2)

    def test_zeta_multipliers(self):
        z = self.src.zeta
        xi = np.linspace(-3, 3, 101)
        assert np.all(z.zeta(1, xi) == 1.0)
        assert np.all(z.zeta(0, np.linspace(-1.0, 1.0, 41)) == 0.0)
        assert np.all(z.zeta(0, np.array([2.0, -2.0, 10.0])) == 1.0)


class TestRhoHat:
    def test_against_direct_quadrature(self):
        import scipy.integrate as si
        src = default_source()
        rh = src.rho_hat()
        for eta in (0.0, 7.0, 37.0, 150.0):
            exact = si.quad(lambda x: float(src.profile.rho(x)) * math.cos(eta * x),
                            -src.profile.r, src.profile.r, limit=600)[0]
            assert abs(float(rh(eta)) - exact) < 1e-9

    def test_even(self):
        rh = default_source().rho_hat()
        eta = np.array([3.0, 17.5, 201.0])
        assert np.all(rh(eta) == rh(-eta))
