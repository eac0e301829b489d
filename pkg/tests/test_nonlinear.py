"""Gauge classes, kernel laws, Picard iterate, bilinear representation."""

import math

import numpy as np
import pytest

from quasirect.fitting import fit_order
from quasirect.linear_solver import LinearField
from quasirect.nonlinear import (IOTA_MINUS, NonlinearitySpec, beta_window,
                                 bilinear_W, classify_gauge, kernel_K,
                                 packet_tables, picard_W, taylor_phases_p01)
from quasirect.sources import default_source
from quasirect.symbols import make_model_symbol
from quasirect.wavepackets import index_sets

SYM = make_model_symbol()
SRC = default_source()
EPS = 1 / 50


@pytest.fixture(scope="module")
def field():
    return LinearField(EPS, SYM, SRC, harmonics=[1])


class TestGauge:
    def test_examples(self):
        cases = [((2, 0, 0.0), "non_resonant", 1.0),
                 ((1, 1, 0.0), "transitional", 0.0),
                 ((2, 0, -1.0), "complete", 0.0)]
        for (j1, j2, om), kind, c_g in cases:
            spec = NonlinearitySpec(j1=j1, j2=j2, omega=om, nu=2.0 - j1 - j2)
            gc = classify_gauge(spec, SYM)
            assert gc.kind == kind
            assert abs(gc.c_g - c_g) < 1e-6

    def test_pointwise_resonance_location(self):
        spec = NonlinearitySpec(j1=1, j2=1, omega=0.5, nu=0.0)
        gc = classify_gauge(spec, SYM)
        assert gc.kind == "pointwise"
        # model symbol: p(xi) = 0.5 at xi = 1
        assert abs(gc.xi_g - 1.0) < 1e-9

    def test_size_validation(self):
        with pytest.raises(ValueError):
            NonlinearitySpec(j1=1, j2=0, nu=0.0)

    def test_iota_minus_value(self):
        assert abs(IOTA_MINUS - (13.0 - math.sqrt(89.0)) / 8.0) < 1e-15


class TestBetaWindow:
    def test_reference_window(self):
        lo, hi = beta_window(2.0, 1.0)
        assert abs(lo - 2.0 / 3.0) < 1e-15
        assert abs(hi - 4.0 / 5.0) < 1e-15

    def test_below_iota_minus_rejected(self):
        with pytest.raises(ValueError):
            beta_window(2.0, 0.3)


class TestKernel:
    def test_tau_zero(self):
        assert kernel_K(0.0, 0.7, SYM) == 0.0

    def test_small_tau_linear_slope(self):
        taus = [1e-3, 3e-3, 1e-2]
        vals = [abs(kernel_K(t, 0.3, SYM)) for t in taus]
        fit = fit_order(taus, vals)
        assert abs(fit.slope - 1.0) < 1e-3

    def test_sqrt_law_at_origin(self):
        vals = [abs(kernel_K(t, 0.0, SYM)) / math.sqrt(t) for t in (1e2, 1e3, 1e4)]
        assert (max(vals) - min(vals)) / max(vals) < 0.10
        # constant approaches 2 sqrt(pi) (exact for the pure xi^-2 gap)
        assert abs(vals[-1] - 2.0 * math.sqrt(math.pi)) < 0.1

    def test_off_origin_growth_between_bounds(self):
        taus = [1e2, 1e3, 1e4]
        vals = [abs(kernel_K(t, 1.0, SYM)) for t in taus]
        fit = fit_order(taus, vals)
        assert fit.slope <= 0.25


class TestPicard:
    def test_time_gate_exact(self, field):
        spec = NonlinearitySpec(j1=2, j2=0, nu=0.0, omega=-1.0, iota=0.6)
        W = picard_W(EPS, spec, field, 0.99)
        assert np.all(W.What == 0.0)

    def test_lambda_scaling_linear(self, field):
        s1 = NonlinearitySpec(lam=1.0, j1=2, j2=0, nu=0.0, omega=-1.0, iota=0.6)
        s2 = NonlinearitySpec(lam=2.5 - 0.5j, j1=2, j2=0, nu=0.0, omega=-1.0, iota=0.6)
        W1 = picard_W(EPS, s1, field, 1.5)
        W2 = picard_W(EPS, s2, field, 1.5)
        z = np.array([0.0, 0.5])
        assert np.allclose(W2.at(z), (2.5 - 0.5j) * W1.at(z), rtol=1e-12)

    def test_resonant_vs_bilinear_cross_method(self, field):
        # two independent routes to W(T, 0) for the resonant gauge
        spec = NonlinearitySpec(j1=2, j2=0, nu=0.0, omega=-1.0, iota=0.6)
        Wp = picard_W(EPS, spec, field, 1.5).at(0.0)[0]
        Wb = bilinear_W(EPS, SYM, SRC, spec, 1.5, 0.0)
        assert abs(Wp - Wb) / abs(Wp) < 0.05

    def test_bilinear_terms_order_eps2(self):
        # every retained pair integral is O(eps^2): check the scale of the sum
        spec = NonlinearitySpec(j1=2, j2=0, nu=0.0, omega=-1.0, iota=0.6)
        sets = index_sets(EPS, SYM, SRC)
        n_pairs = len(sets.K_s()) ** 2
        val = abs(bilinear_W(EPS, SYM, SRC, spec, 1.5, 0.0))
        assert val < n_pairs * EPS**2 * 50.0

    def test_gauge_window_rejected(self):
        spec = NonlinearitySpec(j1=2, j2=0, nu=0.0, omega=-1.0, iota=1.0)
        with pytest.raises(ValueError):
            bilinear_W(EPS, SYM, SRC, spec, 1.5, 0.0, beta=0.9)

    def test_nonresonant_gauge_requires_g1(self):
        spec = NonlinearitySpec(j1=2, j2=0, nu=0.0, omega=0.0, iota=1.0)
        with pytest.raises(ValueError):
            bilinear_W(EPS, SYM, SRC, spec, 1.5, 0.0)


class TestTaylorPhases:
    def test_symmetry(self):
        t = 1.5 / EPS
        a = taylor_phases_p01(SYM, SRC, 10, 14, t)
        b = taylor_phases_p01(SYM, SRC, 14, 10, t)
        assert a == b

    def test_p1_leading_term(self):
        # p1 + (k1+k2) pi -> 0 as eps k^{q+1} grows
        eps = 1 / 400
        t = 1.5 / eps
        gaps = []
        for (k1, k2) in ((40, 44), (90, 96), (120, 124)):
            _, p1 = taylor_phases_p01(SYM, SRC, k1, k2, t)
            gaps.append(abs(p1 + (k1 + k2) * math.pi))
        assert gaps[2] < gaps[0]
        assert gaps[2] < 0.05

    def test_p0_parity_structure(self):
        # for even pairs the gamma-terms contribute ~ +2 gamma at leading order
        eps = 1 / 400
        t = 1.5 / eps
        p0_ee, _ = taylor_phases_p01(SYM, SRC, 90, 96, t)
        p0_eo, _ = taylor_phases_p01(SYM, SRC, 90, 95, t)
        # subtract the symbol-gap parts: they are O(eps^{q beta}) small here
        assert abs(p0_ee - 2.0 * SRC.gamma) < 0.02
        assert abs(p0_eo) < 0.02


class TestWlSplit:
    def test_W_zero_before_cutoff(self, field):
        spec = NonlinearitySpec(j1=2, j2=0, nu=0.0, omega=0.0, iota=1.0)
        W = picard_W(EPS, spec, field, SRC.profile.T_cap)
        assert np.all(W.What == 0.0)

    def test_split_identity_two_routes(self, field):
        # W_l by real-space sampling, W_nl by the spectral kernel route:
        # their sum must reproduce the full iterate within quadrature tolerance
        from quasirect.nonlinear import picard_W_split
        spec = NonlinearitySpec(j1=2, j2=0, nu=0.0, omega=-1.0, iota=0.6)
        W, Wl, Wnl = picard_W_split(EPS, spec, field, 1.5, [0.0, 0.5, 1.0])
        assert np.max(np.abs(W - Wl - Wnl)) < 1e-7


class TestGaugeLadders:
    def test_transitional_gauge_decays(self):
        # g = 0 (|u|^2), iota = 1: sup|W| -> 0 along the ladder (no rate)
        spec = NonlinearitySpec(j1=1, j2=1, nu=0.0, omega=0.0, iota=1.0)
        sups = []
        for eps in (1 / 50, 1 / 100):
            fld = LinearField(eps, SYM, SRC, harmonics=[1])
            sups.append(picard_W(eps, spec, fld, 1.5, tol=1e-5).sup_abs())
        assert sups[1] < sups[0]

    def test_resonant_lattice_parity_ratio_decays(self):
        # g = 1: |W(T, z_off)| / |W(T, 0)| decreases for off-lattice z_off
        spec = NonlinearitySpec(j1=2, j2=0, nu=0.0, omega=-1.0, iota=0.6)
        ratios = []
        for eps in (1 / 50, 1 / 100):
            fld = LinearField(eps, SYM, SRC, harmonics=[1])
            W = picard_W(eps, spec, fld, 1.5, tol=1e-5)
            vals = W.at(np.array([0.0, 1.0, 0.5, math.sqrt(2.0)]))
            ratios.append([abs(v) / abs(vals[0]) for v in vals[1:]])
        for j in range(3):
            assert ratios[1][j] < ratios[0][j]
