"""Toy model: linear estimates, tan law, gauge dichotomy, integrator checks."""

import math

import numpy as np
import pytest

from quasirect.fitting import fit_order
from quasirect.sources import A_eps_sq
from quasirect.toy_ode import (ToyConfig, U_lin_toy, gauge_of, solve_toy_nonlinear,
                               tan_reference, u_lin_toy)


def cfg(eps, **kw):
    base = dict(eps=eps, gamma=0.2, n=1, lam=1.0, j1=2, j2=0, nu=0.0,
                omega=-1.0, T_end=1.0)
    base.update(kw)
    return ToyConfig(**base)


class TestGauge:
    def test_values(self):
        assert gauge_of(2, 0, 0.0) == 2.0       # u^2: non-resonant
        assert gauge_of(1, 1, 0.0) == 0.0       # |u|^2: transitional
        assert gauge_of(2, 0, -1.0) == 1.0      # e^{-it/eps} u^2: complete


class TestLinear:
    def test_zero_at_origin(self):
        assert U_lin_toy(cfg(1 / 50, lam=0.0), 0.0) == 0.0

    def test_u_lin_relation(self):
        c = cfg(1 / 50, lam=0.0)
        t = 12.3
        u = u_lin_toy(c, t)
        U = U_lin_toy(c, c.eps * t)
        assert abs(complex(u) - c.eps * np.exp(1j * t / c.eps) * U) < 1e-12

    def test_nonresonant_harmonics_order(self):
        # n != 1: |U_lin(T)| = O(eps^{3/2} + sqrt(eps) T): fitted over a ladder
        for n in (0, 2):
            epss = [1 / 50, 1 / 100, 1 / 400]
            vals = [abs(U_lin_toy(cfg(e, n=n, lam=0.0), 1.0)) for e in epss]
            bound = [math.sqrt(e) * (1.0 + math.sqrt(e)) for e in epss]
            assert all(v < b for v, b in zip(vals, bound))

    def test_resonant_linear_growth(self):
        # n = 1: U_lin(T) = A^2 T + O(eps)
        for eps in (1 / 50, 1 / 400):
            U = U_lin_toy(cfg(eps, lam=0.0), 1.0)
            A2 = A_eps_sq(0.2, eps)
            assert abs(U - A2) < 6.0 * eps

    def test_per_period_packet_size(self):
        # |u_k| = 2 pi |A^2| eps^2 + O(eps^3): one emitted packet per period
        for eps in (1e-2, 1e-3):
            c = cfg(eps, lam=0.0)
            K = 3
            t0, t1 = 2 * (K - 1) * math.pi, 2 * K * math.pi
            # u_k = eps^{3/2} e^{i t1/eps} int_{t0}^{t1} e^{i gamma(cos s - 1)/eps} ds
            du = (U_lin_toy(c, eps * t1) - U_lin_toy(c, eps * t0))
            u_k = eps * du                      # eps e^{i.}; modulus only
            ref = 2 * math.pi * abs(A_eps_sq(0.2, eps)) * eps**2
            assert abs(abs(u_k) - ref) < 12.0 * eps**3


class TestNonlinear:
    def test_lambda_zero_matches_linear(self):
        c = cfg(1 / 50, lam=0.0)
        tr = solve_toy_nonlinear(c)
        assert np.max(np.abs(tr.U - tr.U_lin)) == 0.0

    def test_tan_law_each_point(self):
        for eps in (1 / 50, 1 / 100, 1 / 400):
            c = cfg(eps)
            tr = solve_toy_nonlinear(c)
            ref = tan_reference(c, 1.0)
            assert abs(tr.U_end - ref) < 4.0 * eps + 0.02

    def test_gauge_noneq_one_linearizable(self):
        # g != 1 at critical size: U = U_lin + O(eps^{3/2}) (slope fit)
        epss = [1 / 50, 1 / 100, 1 / 400]
        diffs = []
        for eps in epss:
            c = cfg(eps, omega=0.0)     # g = 2
            tr = solve_toy_nonlinear(c)
            diffs.append(abs(tr.U_end - tr.U_lin_end))
        fit = fit_order(epss, diffs)
        assert fit.slope >= 1.0          # theory: 3/2

    def test_fact1_dichotomy_quantified(self):
        eps = 1 / 100   # cos(gamma/eps - pi/4) = 0.934: near a cosine maximum
        u1 = abs(solve_toy_nonlinear(cfg(eps, n=1)).U_end)
        A2 = abs(A_eps_sq(0.2, eps))
        assert u1 >= 0.5 * A2 * 1.0
        others = [abs(solve_toy_nonlinear(cfg(eps, n=n)).U_end)
                  for n in (-2, 0, 2, 3)]
        assert max(others) <= 2.0 * math.sqrt(eps)

    def test_integrator_independence(self):
        # halving the step (refine=1) moves U(T_end) by <= 2 tol
        c = cfg(1 / 50)
        a = solve_toy_nonlinear(c, tol=1e-11)
        b = solve_toy_nonlinear(c, tol=1e-11, refine=1)
        assert abs(a.U_end - b.U_end) < 2e-9

    def test_blowup_guard(self):
        with pytest.raises(ValueError):
            solve_toy_nonlinear(cfg(1 / 50, T_end=1.4))

    def test_blowup_warning_recorded(self):
        tr = solve_toy_nonlinear(cfg(1 / 50))   # |A| T = 1.32 > 1.3
        assert any("blow-up proximity" in w for w in tr.warnings)
