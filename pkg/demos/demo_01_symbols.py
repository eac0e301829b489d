#!/usr/bin/env python3
"""Dispersion symbols: the R-wave branch, its asymptotics, and the audit.

Walks the whistler relation 1/xi^2 = G_-(tau) through inversion, checks the
curvature law xi^4 p''(xi) -> ell = -6 empirically, and prints the full
hypothesis audit for both shipped symbols. Writes a dispersion-curve CSV that
plots/render.py can turn into the classic curve-with-asymptote figure.
"""

import numpy as np

from quasirect.artifacts import write_csv, write_manifest
from quasirect.config import build_experiment, load_config
from quasirect.symbols import (G_minus, invert_Gminus, make_model_symbol,
                               make_whistler_symbol, verify_assumptions)

exp = build_experiment(load_config())

print("== inverting the R-wave relation ==")
for w in (0.0, 0.8, 100.0):
    tau = invert_Gminus(w)
    print(f"  G_-(tau) = {w:<8g} ->  tau = {float(tau):.12f}"
          f"   residual {abs(float(G_minus(tau)) - w):.2e}")

sym = make_whistler_symbol()
print("\n== curvature asymptotics (xi^(q+2) p'' -> ell) ==")
for xi in (10.0, 100.0, 1000.0):
    print(f"  xi = {xi:6g}:  xi^4 p''(xi) = {xi**4 * sym.d2p(xi):+.6f}")

print("\n== hypothesis audit ==")
for name, s in (("whistler", sym), ("model", make_model_symbol())):
    rep = verify_assumptions(s, xi_max=1e4, tol=0.01)
    print(f"  {name:9s}: q_hat = {rep.q_hat:.6f}  ell_hat = {rep.ell_hat:.4f}"
          f"  omega_inf = {rep.omega_inf_hat:.6f}  pass = {rep.passed()}")

xi = np.concatenate([np.linspace(0.0, 3.0, 181), np.geomspace(3.0, 60.0, 120)])
rows = [[x, float(sym.p(x)), float(make_model_symbol().p(x)), 1.0] for x in xi]
p = write_csv("out/demos/dispersion_curve.csv", "dispersion-curve v1",
              ["xi", "p_whistler", "p_model", "asymptote"], rows)
write_manifest(p, exp.hash(), "dispersion-curve v1", {})
print(f"\nwrote {p}")
