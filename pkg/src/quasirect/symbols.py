"""Dispersion symbols: construction, analytic derivatives, hypothesis audit.

The central object is an even, bounded symbol p with p = 0 near xi = 0,
p' > 0 past the cutoff, p -> 1 at infinity, and algebraic curvature decay
xi^(q+2) p''(xi) -> ell < 0. Two concrete families are shipped:

* ``whistler``  -- the R-wave branch, p = (1 - chi) * Gminus^{-1}(xi^{-2}),
  with derivatives obtained analytically through the inverse-function rule
  (q = 2, ell = -6);
* ``model``     -- the closed form xi^2 / (1 + xi^2) (q = 2, ell = -6),
  cutoff-free, used as the fast default.

``verify_assumptions`` fits (q, ell) and the related asymptotic constants
numerically and flags each hypothesis, so any user-supplied symbol can be
audited against the same requirements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .smooth import CutoffSpec


# ----------------------------------------------------------------------------
# The R-wave relation G_- and its inverse
# ----------------------------------------------------------------------------

def G_minus(tau):
    """G_-(tau) = (tau - 1) / (tau^2 (tau - 1) - tau) on (0, 1]."""
    tau = np.asarray(tau, dtype=float)
    return (tau - 1.0) / (tau**3 - tau**2 - tau)


def G_minus_d1(tau):
    tau = np.asarray(tau, dtype=float)
    den = tau**3 - tau**2 - tau
    dden = 3.0 * tau**2 - 2.0 * tau - 1.0
    return (den - (tau - 1.0) * dden) / den**2


def G_minus_d2(tau):
    tau = np.asarray(tau, dtype=float)
    den = tau**3 - tau**2 - tau
    dden = 3.0 * tau**2 - 2.0 * tau - 1.0
    d2den = 6.0 * tau - 2.0
    num1 = den - (tau - 1.0) * dden
    dnum1 = -(tau - 1.0) * d2den
    return dnum1 / den**2 - 2.0 * num1 * dden / den**3


def G_plus(tau):
    """L-wave relation G_+(tau) = (tau + 1)/(tau^2 (tau + 1) - tau); evaluator
    only, for documentation plots (tau above the golden-ratio cutoff)."""
    tau = np.asarray(tau, dtype=float)
    return (tau + 1.0) / (tau**3 + tau**2 - tau)


def invert_Gminus(w: float, tol: float = 1e-12, max_iter: int = 100):
    """Unique tau in (0, 1] with G_-(tau) = w, for w >= 0.

    Safeguarded Newton with a bisection bracket; G_- is strictly decreasing
    from +inf (tau -> 0+) to 0 (tau = 1) with G_-' <= -1, so the bracket is
    clean. The result is polished (and returned) in extended precision so the
    right-inverse residual |G_-(tau) - w| stays below 1e-10 absolutely even
    for w ~ 1e6, where plain float64 granularity alone would exceed it.
    """
    if w < 0:
        raise ValueError(f"invert_Gminus needs w >= 0, got {w}")
    if w == 0.0:
        return np.longdouble(1.0)
    hi = 1.0
    lo = min(0.5, 1.0 / (1.0 + w))
    while G_minus(lo) < w:
        lo *= 0.5
        if lo < 1e-300:
            raise RuntimeError("invert_Gminus bracket collapse")
    tau = 0.5 * (lo + hi)
    done = False
    for _ in range(max_iter):
        r = float(G_minus(tau)) - w
        if abs(r) <= tol * (1.0 + w):
            done = True
            break
        if r > 0.0:   # G(tau) too big -> tau too small
            lo = tau
        else:
            hi = tau
        step = r / float(G_minus_d1(tau))
        cand = tau - step
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        tau = cand
    if not done:
        raise RuntimeError(
            f"invert_Gminus did not converge for w={w}: residual {r:.3e} "
            "(tolerance too tight or domain bug)")
    # two extended-precision polish steps: the right-inverse property is
    # then exact to ~1e-13*(1+w) instead of the float64 granularity eps*w
    tl = np.longdouble(tau)
    wl = np.longdouble(w)
    for _ in range(2):
        rl = (tl - 1.0) / (tl**3 - tl**2 - tl) - wl
        den = tl**3 - tl**2 - tl
        dden = 3.0 * tl**2 - 2.0 * tl - 1.0
        g1 = (den - (tl - 1.0) * dden) / den**2
        tl = tl - rl / g1
    return tl


# ----------------------------------------------------------------------------
# Symbol containers
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SymbolParams:
    """Declared asymptotic data of a dispersion symbol.

    xi_c is the declared vanishing radius of the resonance hypothesis and is
    capped at 1/2; support_edge is where p actually starts to increase (the
    whistler cutoff is flat out to 5/8, which still satisfies "p = 0 on
    [0, xi_c]" for every xi_c <= 1/2). Monotonicity is audited beyond
    support_edge.
    """
    q: float = 2.0
    ell: float = -6.0
    xi_c: float = 0.0
    D: int = 4
    kind: str = "model"
    support_edge: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.ell >= 0:
            raise ValueError(f"ell must be < 0, got {self.ell}")
        if not (0.0 <= self.xi_c <= 0.5):
            raise ValueError(f"xi_c must lie in [0, 1/2], got {self.xi_c}")
        if self.q < 2 and self.kind in ("model", "whistler"):
            raise ValueError(f"q >= 2 required, got {self.q}")
        if self.D < 4:
            raise ValueError(f"D >= 4 required, got {self.D}")
        if self.support_edge is None:
            object.__setattr__(self, "support_edge", self.xi_c)


@dataclass(frozen=True)
class DispersionSymbol:
    """Evaluable even symbol with analytic first and second derivatives.

    Immutable after construction; safe for concurrent read-only use. The
    callables receive |xi| internally, so evenness of p (and oddness of p')
    holds exactly in floating point.
    """
    params: SymbolParams
    _p: Callable = field(repr=False)
    _dp: Callable = field(repr=False)
    _d2p: Callable = field(repr=False)
    omega_inf: float = 1.0

    @staticmethod
    def _shape(value, like):
        if np.ndim(like) == 0:
            return float(np.asarray(value).reshape(-1)[0])
        return np.asarray(value)

    def p(self, xi):
        out = self._p(np.abs(np.asarray(xi, dtype=float)))
        return self._shape(out, xi)

    def dp(self, xi):
        arr = np.asarray(xi, dtype=float)
        out = np.sign(arr) * self._dp(np.abs(arr))
        return self._shape(out, xi)

    def d2p(self, xi):
        out = self._d2p(np.abs(np.asarray(xi, dtype=float)))
        return self._shape(out, xi)

    def one_minus_p_coeff(self) -> float:
        """kappa with 1 - p(xi) ~ kappa * xi^{-q}: kappa = -ell/(q(q+1))."""
        q = self.params.q
        return -self.params.ell / (q * (q + 1.0))

    def dp_coeff(self) -> float:
        """kappa' with p'(xi) ~ kappa' * xi^{-(q+1)}: kappa' = -ell/(q+1)."""
        return -self.params.ell / (self.params.q + 1.0)


def model_p(xi):
    """Closed-form test symbol xi^2/(1+xi^2); xi_c = 0, q = 2, ell = -6."""
    xi = np.asarray(xi, dtype=float)
    return xi**2 / (1.0 + xi**2)


def _model_dp(xi):
    return 2.0 * xi / (1.0 + xi**2) ** 2


def _model_d2p(xi):
    return 2.0 * (1.0 - 3.0 * xi**2) / (1.0 + xi**2) ** 3


def make_model_symbol(D: int = 4) -> DispersionSymbol:
    params = SymbolParams(q=2.0, ell=-6.0, xi_c=0.0, D=D, kind="model")
    return DispersionSymbol(params, model_p, _model_dp, _model_d2p)


class _WhistlerCore:
    """tau_w(xi) = Gminus^{-1}(xi^{-2}) with inverse-function derivatives,
    multiplied by (1 - chi). Vectorized, with a small tau-solve cache."""

    def __init__(self, cutoff: CutoffSpec, tol: float = 1e-12):
        self.cutoff = cutoff
        self.tol = tol

    def _tau(self, xi_abs):
        xi_abs = np.atleast_1d(np.asarray(xi_abs, dtype=float))
        tau = np.empty_like(xi_abs)
        for i, x in enumerate(xi_abs):
            tau[i] = invert_Gminus(x**-2, tol=self.tol) if x > 0 else 0.0
        return tau

    def p(self, xi_abs):
        xi_abs = np.atleast_1d(np.asarray(xi_abs, dtype=float))
        out = np.zeros_like(xi_abs)
        live = xi_abs > self.cutoff.inner
        if np.any(live):
            x = xi_abs[live]
            out[live] = (1.0 - self.cutoff.chi(x)) * self._tau(x)
        return out if out.ndim else float(out)

    def _tau_derivs(self, x):
        """(tau, tau', tau'') at xi = x > inner, via the inverse rule."""
        tau = self._tau(x)
        g1 = G_minus_d1(tau)
        g2 = G_minus_d2(tau)
        w1 = -2.0 * x**-3         # d/dxi xi^{-2}
        w2 = 6.0 * x**-4
        dtau = w1 / g1
        d2tau = w2 / g1 - w1 * g2 * dtau / g1**2
        return tau, dtau, d2tau

    def dp(self, xi_abs):
        xi_abs = np.atleast_1d(np.asarray(xi_abs, dtype=float))
        out = np.zeros_like(xi_abs)
        live = xi_abs > self.cutoff.inner
        if np.any(live):
            x = xi_abs[live]
            tau, dtau, _ = self._tau_derivs(x)
            chi = self.cutoff.chi(x)
            dchi = self.cutoff.chi_d1(x)
            out[live] = -dchi * tau + (1.0 - chi) * dtau
        return out

    def d2p(self, xi_abs):
        xi_abs = np.atleast_1d(np.asarray(xi_abs, dtype=float))
        out = np.zeros_like(xi_abs)
        live = xi_abs > self.cutoff.inner
        if np.any(live):
            x = xi_abs[live]
            tau, dtau, d2tau = self._tau_derivs(x)
            chi = self.cutoff.chi(x)
            dchi = self.cutoff.chi_d1(x)
            d2chi = self.cutoff.chi_d2(x)
            out[live] = -d2chi * tau - 2.0 * dchi * dtau + (1.0 - chi) * d2tau
        return out


def whistler_p(xi, cutoff: Optional[CutoffSpec] = None):
    """R-wave symbol (1 - chi(xi)) * Gminus^{-1}(xi^{-2}); values in [0, 1)."""
    core = _WhistlerCore(cutoff or CutoffSpec())
    out = core.p(np.abs(np.asarray(xi, dtype=float)))
    return out


def make_whistler_symbol(cutoff: Optional[CutoffSpec] = None, D: int = 4,
                         tol: float = 1e-12) -> DispersionSymbol:
    cutoff = cutoff or CutoffSpec()
    core = _WhistlerCore(cutoff, tol=tol)
    params = SymbolParams(q=2.0, ell=-6.0, xi_c=0.5, D=D, kind="whistler",
                          support_edge=cutoff.inner)
    return DispersionSymbol(params, core.p, core.dp, core.d2p)


def make_constant_symbol(xi_c: float = 0.5) -> DispersionSymbol:
    """p == 1 beyond xi_c: violates the monotonicity hypothesis on purpose."""
    params = SymbolParams(q=2.0, ell=-6.0, xi_c=xi_c, D=4, kind="custom")

    def p(x):
        return np.where(np.asarray(x, dtype=float) > xi_c, 1.0, 0.0)

    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return DispersionSymbol(params, p, zero, zero)


def make_symbol(kind: str, **kwargs) -> DispersionSymbol:
    if kind == "model":
        return make_model_symbol(D=kwargs.get("D", 4))
    if kind == "whistler":
        cut = CutoffSpec(kwargs.get("chi_inner", 0.625), kwargs.get("chi_outer", 1.0))
        return make_whistler_symbol(cutoff=cut, D=kwargs.get("D", 4))
    if kind == "constant":
        return make_constant_symbol(xi_c=kwargs.get("xi_c", 0.5))
    raise ValueError(f"unknown symbol kind {kind!r}")


# ----------------------------------------------------------------------------
# Hypothesis audit
# ----------------------------------------------------------------------------

@dataclass
class AssumptionReport:
    q_hat: float
    ell_hat: float
    omega_inf_hat: float
    evenness_residual: float
    monotonic_ok: bool
    dp_limit_hat: float            # fitted limit of xi^{q+1} p'
    gap_coeff_hat: float           # fitted limit of xi^q (1 - p)
    derivative_ratio_max: float    # sup |p^(n)|/p' sampled, n <= D
    fit_ok: bool
    flags: dict

    def passed(self) -> bool:
        return all(self.flags.values())


def verify_assumptions(sym: DispersionSymbol, xi_max: float = 1e4,
                       tol: float = 0.01, n_fit: int = 200) -> AssumptionReport:
    """Numerically audit the symbol hypotheses and fit (q, ell).

    The fit runs over xi in [xi_max/100, xi_max] (log-spaced): slope of
    log|p''| gives -(q+2), the intercept gives |ell|. Requires xi_max >= 100.
    """
    if xi_max < 100.0:
        raise ValueError("xi_max must be >= 100 for a meaningful asymptotic fit")
    pr = sym.params
    xi = np.geomspace(xi_max / 100.0, xi_max, n_fit)
    d2 = sym.d2p(xi)
    fit_ok = bool(np.all(d2 < 0.0))
    if fit_ok:
        coef = np.polyfit(np.log(xi), np.log(-d2), 1)
        q_hat = -coef[0] - 2.0
        ell_hat = -math.exp(coef[1])
    else:
        q_hat = math.nan
        ell_hat = math.nan

    tail = xi[-n_fit // 4:]
    dp_limit_hat = float(np.mean(tail ** (pr.q + 1.0) * sym.dp(tail)))
    gap_coeff_hat = float(np.mean(tail ** pr.q * (sym.omega_inf - sym.p(tail))))
    omega_inf_hat = float(np.asarray(sym.p(xi_max)) + gap_coeff_hat * xi_max ** (-pr.q))

    # evenness: exact by construction, still sampled
    xs = np.geomspace(1e-3, xi_max, 64)
    evenness = float(np.max(np.abs(sym.p(xs) - sym.p(-xs))))

    # monotonicity on (support_edge, xi_max]: strict increase is required
    # wherever p has visibly left its flat zone (the exp(-1/u) transition
    # underflows to 0.0 right at the edge, which is not a violation)
    edge = pr.support_edge
    xm = np.geomspace(max(edge, 1e-3) * (1.0 + 1e-4) + 1e-6, xi_max, 2048)
    xm = xm[xm > edge]
    dpm = sym.dp(xm)
    live = sym.p(xm) > 1e-12
    monotonic_ok = bool(np.all(dpm >= 0.0) and live.any() and np.all(dpm[live] > 0.0))

    # derivative ratios |p^(n)|/p' up to order D; n = 3, 4 by central
    # differences of the analytic p'' (diagnostic boundedness check only)
    xr = np.geomspace(2.0, xi_max, 256)
    dpr = sym.dp(xr)
    if np.all(dpr > 0.0):
        h = 1e-3 * xr
        d3 = (sym.d2p(xr + h) - sym.d2p(xr - h)) / (2.0 * h)
        d4 = (sym.d2p(xr + h) - 2.0 * sym.d2p(xr) + sym.d2p(xr - h)) / h**2
        ratios = [np.max(np.abs(sym.d2p(xr)) / dpr), np.max(np.abs(d3) / dpr)]
        if pr.D >= 4:
            ratios.append(np.max(np.abs(d4) / dpr))
    else:
        ratios = [math.inf]
    ratio_max = float(max(ratios))

    flags = {
        "curvature_fit": fit_ok and abs(q_hat - pr.q) <= tol * max(1.0, abs(pr.q))
                         and abs(ell_hat - pr.ell) <= tol * abs(pr.ell),
        "dp_limit": fit_ok and abs(dp_limit_hat - sym.dp_coeff()) <= tol * abs(sym.dp_coeff()),
        "gap_coeff": fit_ok and abs(gap_coeff_hat - sym.one_minus_p_coeff())
                     <= tol * abs(sym.one_minus_p_coeff()),
        "normalization": abs(omega_inf_hat - sym.omega_inf) <= tol,
        "evenness": evenness == 0.0,
        "monotonicity": monotonic_ok,
        "derivative_ratios_bounded": math.isfinite(ratio_max),
    }
    return AssumptionReport(
        q_hat=q_hat, ell_hat=ell_hat, omega_inf_hat=omega_inf_hat,
        evenness_residual=evenness, monotonic_ok=monotonic_ok,
        dp_limit_hat=dp_limit_hat, gap_coeff_hat=gap_coeff_hat,
        derivative_ratio_max=ratio_max, fit_ok=fit_ok, flags=flags)
