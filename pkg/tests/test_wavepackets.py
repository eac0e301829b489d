"""Critical points, Hessians, packet formulas, index sets, packet sums."""

import math

import numpy as np
import pytest

from quasirect.fitting import fit_order
from quasirect.linear_solver import LinearField
from quasirect.sources import default_source
from quasirect.symbols import make_model_symbol
from quasirect.wavepackets import (dispersive_constant, delta0, find_critical_point,
                                   h_k, dh_k_ds, hessian_Sk, index_sets, packet_u_k,
                                   packet_prefactor, s_k_asymptotic,
                                   stationary_constant, sum_packets, tau_k0,
                                   wk_exact_2d)

SYM = make_model_symbol()
SRC = default_source()
GAMMA = SRC.gamma
EPS = 1 / 50


class TestIndexSets:
    def test_partition(self):
        sets = index_sets(EPS, SYM, SRC)
        K = set(sets.K().tolist())
        Kd = set(sets.K_d().tolist())
        Ks = set(sets.K_s().tolist())
        assert Kd | Ks == K and not (Kd & Ks)
        assert set(sets.K_s_confirmed().tolist()) <= Ks

    def test_k_max_formula(self):
        sets = index_sets(EPS, SYM, SRC)
        assert sets.k_max == int(2 / 3 + SRC.profile.T_cap / (math.pi * EPS))

    def test_delta0_positive(self):
        d0 = delta0(SYM)
        assert d0 > 0.0
        # model symbol: eta^3 p' = 2 eta^4/(1+eta^2)^2, increasing; min at 3/4
        assert abs(d0 - 2 * 0.75**4 / (1 + 0.75**2) ** 2) < 1e-6

    def test_c1_covers_detection(self):
        c1 = stationary_constant(SYM, 1.0, 0.09, 0.2)
        assert c1 >= 4.0 * dispersive_constant(SYM, 1.0, 0.09)


class TestCriticalPoints:
    def test_constructed_root(self):
        # t* = k pi - (1 - p(k pi))/p'(k pi) makes s = 0 a root of h_k(t*; .) = 0
        k = 12
        kp = k * math.pi
        tstar = kp - (1.0 - SYM.p(kp)) / SYM.dp(kp)
        cp = find_critical_point(SYM, GAMMA, k, tstar, 0.0)
        assert cp.exists
        assert abs(cp.s) < 1e-12
        assert cp.xi == cp.s
        assert abs(cp.y - (1.0 - SYM.p(kp))) < 1e-12

    def test_monotone_slope_bound(self):
        # |d_s h_k| >= gamma/4 on (-pi/3, pi/3) across the detection-confirmed
        # set (the transition-zone dip near (t - k pi) p'' ~ gamma sits below
        # the confirmed threshold at every desk eps and carries no amplitude)
        sets = index_sets(EPS, SYM, SRC)
        s = np.linspace(-math.pi / 3 + 1e-6, math.pi / 3 - 1e-6, 101)
        t = 1.5 / EPS
        for k in sets.K_s_confirmed():
            vals = np.abs(dh_k_ds(SYM, GAMMA, int(k), t, s))
            assert np.min(vals) >= GAMMA / 4.0

    def test_newton_vs_grid_search(self):
        # dense-grid argmin oracle agrees with Newton to 1e-8
        k, t, x = 10, 1.5 / EPS, 0.03
        cp = find_critical_point(SYM, GAMMA, k, t, x)
        s_grid = np.linspace(-math.pi / 3, math.pi / 3, 100_001)
        f = h_k(SYM, GAMMA, k, t, s_grid) - x
        i = int(np.argmin(np.abs(f)))
        i0 = i if f[i] * f[i + 1] < 0 else i - 1     # bracketing pair
        s_best = s_grid[i0] - f[i0] * (s_grid[i0 + 1] - s_grid[i0]) / (f[i0 + 1] - f[i0])
        assert abs(cp.s - s_best) < 1e-8

    def test_detection_guaranteed_in_confirmed_set(self):
        sets = index_sets(EPS, SYM, SRC)
        t = 1.5 / EPS
        for k in sets.K_s_confirmed():
            for x in (-SRC.profile.r, 0.0, SRC.profile.r):
                assert find_critical_point(SYM, GAMMA, int(k), t, x).exists

    def test_large_k_h_asymptote(self):
        # h_k ~ (-1)^{k+1} gamma sin s + O(k^-q) + (1/eps) O(k^-q-1)
        eps = 1 / 400
        t = 1.5 / eps
        s = np.linspace(-1.0, 1.0, 41)
        resid = []
        ks = [40, 60, 90, 120]
        for k in ks:
            sgn = -1.0 if k % 2 == 0 else 1.0
            r = np.max(np.abs(h_k(SYM, GAMMA, k, t, s) - sgn * GAMMA * np.sin(s)))
            resid.append(r)
        bound = [k**-2.0 + (1 / eps) * k**-3.0 * 3.0 for k in ks]
        assert all(r < 3.0 * b for r, b in zip(resid, bound))


class TestAsymptoticCriticalTime:
    def test_trivial_zero(self):
        # x = 0 and tau_k0 = 0 => s = 0: engineer t so that tau_k0(t) = 0
        k = 20
        kp = k * math.pi
        t0 = kp - (1.0 - SYM.p(kp)) / SYM.dp(kp)
        assert abs(tau_k0(SYM, k, t0)) < 1e-14
        assert s_k_asymptotic(SYM, GAMMA, k, t0, 0.0) == 0.0

    def test_large_k_limit_is_arcsin(self):
        eps, x = 1 / 400, 0.05
        k = 120
        t = 1.5 / eps
        sk = s_k_asymptotic(SYM, GAMMA, k, t, x)
        skx = (-1.0) ** (k + 1) * math.asin(x / GAMMA)
        assert abs(sk - skx) < 5.0 / (eps * k**3)

    def test_error_slope_vs_newton(self):
        # |s_k_asym - s_k_newton| fits 1/(eps k^{q+2}) over a k sweep
        eps, x, t = 1 / 200, 0.04, 1.5 * 200
        ks = np.array([12, 18, 26, 38, 54])
        errs = []
        for k in ks:
            cp = find_critical_point(SYM, GAMMA, int(k), t, x)
            errs.append(abs(s_k_asymptotic(SYM, GAMMA, int(k), t, x) - cp.s) + 1e-18)
        slope = fit_order(1.0 / ks, errs).slope   # err ~ k^-slope
        assert slope >= 3.0   # at least the k^{-(q+1)}-side; typically ~k^{-(q+2)}

    def test_domain_violation_reported(self):
        with pytest.raises(ValueError, match="inapplicable"):
            s_k_asymptotic(SYM, GAMMA, 40, 1.5 * 50, 0.3)


class TestHessian:
    def test_signature_parity_full_run(self):
        sets = index_sets(EPS, SYM, SRC)
        t = 1.5 / EPS
        for k in sets.K_s_confirmed():
            cp = find_critical_point(SYM, GAMMA, int(k), t, 0.02)
            S, det, sig = hessian_Sk(SYM, GAMMA, cp)
            assert sig == (1 if k % 2 == 0 else -1)
            # eigenvalue signs: k even (+,+,-), k odd (+,-,-)
            signs = np.sort(np.sign(np.linalg.eigvalsh(S)))
            expect = [-1, 1, 1] if k % 2 == 0 else [-1, -1, 1]
            assert signs.tolist() == expect

    def test_det_asymptote(self):
        # det S_k -> -(-1)^k gamma cos s_k as eps k^{q+2} grows
        eps = 1 / 400
        t = 1.5 / eps
        gaps = []
        ks = [30, 60, 120]
        for k in ks:
            cp = find_critical_point(SYM, GAMMA, k, t, 0.0)
            _, det, _ = hessian_Sk(SYM, GAMMA, cp)
            sgn = 1.0 if k % 2 == 0 else -1.0
            gaps.append(abs(det - (-sgn * GAMMA * math.cos(cp.s))) + 1e-18)
        assert gaps[2] < gaps[0]

    def test_exact_det_expansion(self):
        cp = find_critical_point(SYM, GAMMA, 9, 1.5 / EPS, 0.01)
        S, det, _ = hessian_Sk(SYM, GAMMA, cp)
        assert abs(det - np.linalg.det(S)) < 1e-12


class TestPackets:
    def test_zero_amplitude_outside_support(self):
        # engineer a critical point whose emission time is outside theta
        eps = 1 / 50
        k = 2   # eps k pi = 0.126 < T_lo: dead packet
        t = 1.5 / eps
        cp = find_critical_point(SYM, GAMMA, k, t, 0.0)
        if cp.exists:
            pk = packet_u_k(eps, SYM, SRC, cp)
            assert pk.value == 0.0

    def test_uniform_size_bound(self):
        # |u_k| <= eps^2 sqrt(2 pi) C^{-1/2} sup|a|
        eps = 1 / 50
        sets = index_sets(eps, SYM, SRC)
        t = 1.5 / eps
        sup_a = 1.0 + SRC.profile.accent
        for k in sets.K_s_confirmed():
            cp = find_critical_point(SYM, GAMMA, int(k), t, 0.01)
            pk = packet_u_k(eps, SYM, SRC, cp)
            bound = eps**2 * math.sqrt(2 * math.pi) * sup_a / math.sqrt(GAMMA / 2.0)
            assert abs(pk.value) <= bound

    def test_xi_equals_s_invariant(self):
        sets = index_sets(EPS, SYM, SRC)
        t = 1.25 / EPS
        for k in sets.K_s_confirmed():
            cp = find_critical_point(SYM, GAMMA, int(k), t, -0.02)
            assert cp.xi == cp.s
            assert abs(cp.s) < math.pi / 3

    def test_packet_vs_exact_2d_integral(self):
        # stationary-phase leading term against the exact-y-integrated w_k
        import dataclasses
        prof = dataclasses.replace(SRC.profile, T_cap=8.0, T_lo=1.0,
                                   theta_edge=0.8, accent=0.05)
        src = dataclasses.replace(SRC, profile=prof)
        k, x = 40, 0.01
        errs = []
        for eps in (1 / 40, 1 / 80):
            t = 1.5 * 8.0 / eps
            cp = find_critical_point(SYM, GAMMA, k, t, x)
            pk = packet_u_k(eps, SYM, src, cp)
            wk = wk_exact_2d(eps, SYM, src, k, t, x, refine=1, rho_rel=1e-6)
            ref = packet_prefactor(eps, GAMMA, k, x) * wk
            errs.append(abs(pk.value - ref) / abs(ref))
        assert errs[1] < errs[0]          # relative error decreases with eps
        assert errs[1] < 2e-2

    def test_dispersive_regime_negligible(self):
        # brute-force (exact-y 2-D) dispersive packets are at least 10x below
        # the smallest retained packet; needs a profile alive at small T
        import dataclasses
        prof = dataclasses.replace(SRC.profile, T_lo=0.02, theta_edge=0.008)
        src = dataclasses.replace(SRC, profile=prof)
        eps = 1 / 50
        sets = index_sets(eps, SYM, src)
        t = 1.5 / eps
        disp = [abs(wk_exact_2d(eps, SYM, src, int(k), t, x, rho_rel=1e-4))
                for k in sets.K_d() for x in (0.0, 0.05)]
        retained = []
        for k in sets.K_s_confirmed():
            cp = find_critical_point(SYM, GAMMA, int(k), t, 0.0)
            pk = packet_u_k(eps, SYM, src, cp)
            if abs(pk.value) > 0:
                w_equiv = abs(pk.value) / abs(packet_prefactor(eps, GAMMA, int(k), 0.0))
                retained.append(w_equiv)
        assert max(disp) * 10.0 <= min(retained)


class TestPacketSum:
    def test_matches_oracle(self):
        fld = LinearField(EPS, SYM, SRC, harmonics=[1])
        sets = index_sets(EPS, SYM, SRC)
        T = 1.5
        for z in (0.0, 2.0):
            ps = sum_packets(EPS, SYM, SRC, T, z, sets)
            Uo = fld.U_at(T, z)[0]
            assert abs(ps.U - Uo) / abs(Uo) < 0.02

    def test_rejects_outside_support(self):
        with pytest.raises(ValueError):
            sum_packets(EPS, SYM, SRC, 1.5, 10.0 / EPS)

    def test_deterministic(self):
        sets = index_sets(EPS, SYM, SRC)
        a = sum_packets(EPS, SYM, SRC, 1.5, 1.0, sets).U
        b = sum_packets(EPS, SYM, SRC, 1.5, 1.0, sets).U
        assert a == b
