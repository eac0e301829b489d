"""The scalar toy model: filtered linear solution, Picard nonlinear solve, tan law.

In slow time T = eps*t the filtered unknown U(T) = (1/eps) e^{-iT/eps^2} u(T/eps)
satisfies

    U'(T) = eps^{-1/2} exp(i (n-1) T/eps^2 + i n gamma (cos(T/eps) - 1)/eps)
            + lam eps^{nu+j1+j2-2} exp(i (g-1) T/eps^2) U^j1 conj(U)^j2,

with g = omega + j1 - j2. Everything is integrated on a shared panel grid of
Gauss-Legendre nodes sized to the fastest oscillation (the eps^-2 gauge factor),
with exact per-panel Legendre antiderivatives, so the cumulative integrals are
spectrally accurate. The nonlinear solve is a windowed Picard iteration on the
integral form; window lengths keep the iteration contractive even near the
tan-law growth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .oscquad import gl_nodes
from .sources import A_eps


def gauge_of(j1: int, j2: int, omega: float) -> float:
    """Gauge parameter g = omega + j1 - j2."""
    return omega + j1 - j2


@dataclass(frozen=True)
class ToyConfig:
    eps: float = 0.02
    gamma: float = 0.2
    n: int = 1
    lam: complex = 1.0
    j1: int = 2
    j2: int = 0
    nu: float = 0.0
    omega: float = -1.0
    T_end: float = 1.0
    blowup_warn: float = 1.3
    blowup_hard: float = 1.45
    amp_bound: float = 25.0

    def __post_init__(self):
        if not (0.0 < self.gamma < 0.25):
            raise ValueError("gamma out of (0, 1/4)")
        if not (0.0 < self.eps <= 1.0):
            raise ValueError("eps out of (0, 1]")
        if self.j1 + self.j2 < 2 and self.lam != 0:
            raise ValueError("need j1 + j2 >= 2 for the nonlinearity")

    @property
    def gauge(self) -> float:
        return gauge_of(self.j1, self.j2, self.omega)

    @property
    def critical_weight(self) -> float:
        """eps^(nu+j1+j2-2): 1 at the critical size."""
        return self.eps ** (self.nu + self.j1 + self.j2 - 2.0)


# ----------------------------------------------------------------------------
# Shared panel grid with exact Legendre antiderivatives
# ----------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _legendre_ops(deg: int):
    x, w = gl_nodes(deg)
    P = np.polynomial.legendre.legvander(x, deg)              # (deg, deg+1)
    proj = (np.arange(deg) + 0.5)[None, :] * (P[:, :deg] * w[:, None])
    proj = proj.T                                             # coeffs = proj @ values
    # antiderivative from the left edge: M[i, n] = int_{-1}^{x_i} P_n
    M = np.empty((deg, deg))
    M[:, 0] = x + 1.0
    for n in range(1, deg):
        M[:, n] = (P[:, n + 1] - P[:, n - 1]) / (2.0 * n + 1.0)
    cum_nodes = M @ proj                                      # values -> partial integrals
    total = (2.0 * proj[0, :])                                # values -> full panel integral
    return x, cum_nodes, total


class PanelGrid:
    """Uniform panels over [0, T_end], deg Gauss-Legendre nodes per panel."""

    def __init__(self, T_end: float, rate: float, deg: int = 12,
                 n_pp_periods: float = 1.0, min_panels: int = 24,
                 max_nodes: int = 40_000_000):
        n_panels = max(min_panels, int(math.ceil(T_end * rate / (2.0 * math.pi) / n_pp_periods)))
        if n_panels * deg > max_nodes:
            raise MemoryError(f"toy grid would need {n_panels * deg} nodes")
        self.deg = deg
        self.n_panels = n_panels
        self.T_end = T_end
        self.width = T_end / n_panels
        x, self._cum, self._tot = _legendre_ops(deg)
        edges = self.width * np.arange(n_panels)
        self.nodes = (edges[:, None] + 0.5 * self.width * (x[None, :] + 1.0)).ravel()

    def cumulative(self, values: np.ndarray) -> np.ndarray:
        """Cumulative integral from 0, evaluated at every node."""
        v = values.reshape(self.n_panels, self.deg)
        half = 0.5 * self.width
        within = (v @ self._cum.T) * half
        totals = (v @ self._tot) * half
        base = np.concatenate(([0.0], np.cumsum(totals)[:-1]))
        return (base[:, None] + within).ravel()

    def integral(self, values: np.ndarray) -> complex:
        v = values.reshape(self.n_panels, self.deg)
        return complex(np.sum((v @ self._tot) * 0.5 * self.width))


def _source_rate(cfg: ToyConfig) -> float:
    e = cfg.eps
    return (abs(cfg.n - 1) + abs(cfg.n) * cfg.gamma) / e**2


def _gauge_rate(cfg: ToyConfig) -> float:
    return abs(cfg.gauge - 1.0) / cfg.eps**2


def _grid(cfg: ToyConfig, refine: int = 0) -> PanelGrid:
    rate = max(_source_rate(cfg), _gauge_rate(cfg), 1.0 / cfg.eps)
    return PanelGrid(cfg.T_end, rate * (1 << refine))


def _source_values(cfg: ToyConfig, T: np.ndarray) -> np.ndarray:
    e = cfg.eps
    phase = (cfg.n - 1) * T / e**2 + cfg.n * cfg.gamma * (np.cos(T / e) - 1.0) / e
    return np.exp(1j * phase) / math.sqrt(e)


def U_lin_toy(cfg: ToyConfig, T, refine: int = 0):
    """U_lin at time(s) T: explicit oscillatory integral on the panel grid."""
    T = np.atleast_1d(np.asarray(T, dtype=float))
    out = np.empty(T.shape, dtype=complex)
    for i, Ti in enumerate(T):
        if Ti == 0.0:
            out[i] = 0.0
            continue
        sub = ToyConfig(**{**cfg.__dict__, "T_end": float(Ti)})
        g = _grid(sub, refine=refine)
        out[i] = g.integral(_source_values(cfg, g.nodes))
    return out if out.size > 1 else complex(out[0])


def u_lin_toy(cfg: ToyConfig, t):
    """u_lin(t) = eps e^{it/eps} U_lin(eps t)."""
    t = np.asarray(t, dtype=float)
    return cfg.eps * np.exp(1j * t / cfg.eps) * U_lin_toy(cfg, cfg.eps * t)


def tan_reference(cfg: ToyConfig, T):
    """A_eps tan(A_eps T): the limiting law for g = 1, (j1, j2) = (2, 0)."""
    A = A_eps(cfg.gamma, cfg.eps)
    return A * np.tan(A * np.asarray(T, dtype=float))


@dataclass
class ToyTrajectory:
    cfg: ToyConfig
    T: np.ndarray
    U: np.ndarray
    U_lin: np.ndarray
    iterations: int
    warnings: list = field(default_factory=list)
    converged: bool = True
    U_end: complex = 0.0 + 0.0j   # exact endpoint assembly (no interpolation)
    U_lin_end: complex = 0.0 + 0.0j

    def at(self, T_query: float) -> complex:
        """U at an arbitrary time (endpoint exact, else node interpolation)."""
        if T_query >= self.T[-1]:
            return self.U_end
        re = np.interp(T_query, self.T, self.U.real)
        im = np.interp(T_query, self.T, self.U.imag)
        return complex(re + 1j * im)

    def tan_ref(self):
        return tan_reference(self.cfg, self.T)


def solve_toy_nonlinear(cfg: ToyConfig, tol: float = 1e-11,
                        refine: int = 0, max_iter: int = 200) -> ToyTrajectory:
    """Windowed Picard solve of the filtered integral equation.

    The trajectory lives on the shared Gauss-Legendre node grid; per window
    the map U -> U_lin + lam_eff * cumint(gauge * U^j1 conj(U)^j2) is iterated
    to a fixed point. Non-contraction (window too long for the current
    amplitude) halves the window; proximity to the configured amplitude bound
    is reported, and the g = 1 blow-up guard rejects T_end too close to the
    tan-law singularity.
    """
    warnings = []
    if cfg.gauge == 1.0 and cfg.lam != 0:
        A = abs(A_eps(cfg.gamma, cfg.eps))
        if A * cfg.T_end >= cfg.blowup_hard:
            raise ValueError(
                f"|A_eps| T_end = {A * cfg.T_end:.4f} too close to the tan-law "
                f"blow-up (hard guard {cfg.blowup_hard})")
        if A * cfg.T_end > cfg.blowup_warn:
            warnings.append(f"blow-up proximity: |A_eps| T_end = {A * cfg.T_end:.4f}")

    grid = _grid(cfg, refine=refine)
    Tn = grid.nodes
    U_lin = np.empty_like(Tn, dtype=complex)
    src = _source_values(cfg, Tn)
    U_lin = grid.cumulative(src)

    U_lin_end = grid.integral(src)
    if cfg.lam == 0:
        return ToyTrajectory(cfg, Tn, U_lin.copy(), U_lin, 0, warnings,
                             U_end=U_lin_end, U_lin_end=U_lin_end)

    lam_eff = cfg.lam * cfg.critical_weight
    gauge_phase = np.exp(1j * (cfg.gauge - 1.0) * Tn / cfg.eps**2)

    deg, n_panels = grid.deg, grid.n_panels
    U = np.empty_like(U_lin)
    base = 0.0 + 0.0j     # accumulated nonlinear integral up to window start
    p0 = 0                # first panel of the current window
    win = max(1, n_panels // 64)
    total_iter = 0
    U_prev_end = 0.0 + 0.0j

    while p0 < n_panels:
        # contraction estimate from the current amplitude
        amp = max(abs(U_prev_end), 1e-3)
        L = abs(lam_eff) * (cfg.j1 + cfg.j2) * (1.6 * amp) ** max(cfg.j1 + cfg.j2 - 1, 1)
        win_len_max = 0.4 / max(L, 1e-12)
        win = max(1, min(n_panels - p0, int(win_len_max / grid.width)))
        while True:
            sl = slice(p0 * deg, (p0 + win) * deg)
            Tw = Tn[sl]
            Uw = np.full(Tw.shape, U_prev_end, dtype=complex)
            ok = False
            for it in range(max_iter):
                integrand = gauge_phase[sl] * Uw**cfg.j1 * np.conj(Uw) ** cfg.j2
                v = integrand.reshape(win, deg)
                half = 0.5 * grid.width
                within = (v @ grid._cum.T) * half
                totals = (v @ grid._tot) * half
                wbase = np.concatenate(([0.0], np.cumsum(totals)[:-1]))
                cum = (wbase[:, None] + within).ravel()
                U_new = U_lin[sl] + lam_eff * (base + cum)
                diff = np.max(np.abs(U_new - Uw))
                Uw = U_new
                total_iter += 1
                if diff <= tol * max(1.0, np.max(np.abs(Uw))):
                    ok = True
                    break
            if ok or win == 1:
                break
            win = max(1, win // 2)
        if not ok:
            warnings.append(f"non-contraction at panel {p0} (step too coarse)")
            return ToyTrajectory(cfg, Tn, U_lin, U_lin, total_iter, warnings, converged=False)
        U[sl] = Uw
        peak = float(np.max(np.abs(Uw)))
        if peak > cfg.amp_bound:
            warnings.append(f"amplitude {peak:.2f} exceeded bound {cfg.amp_bound}")
        # advance: accumulate the window's full nonlinear integral
        integrand = gauge_phase[sl] * Uw**cfg.j1 * np.conj(Uw) ** cfg.j2
        v = integrand.reshape(win, deg)
        base += complex(np.sum((v @ grid._tot) * 0.5 * grid.width))
        U_prev_end = Uw[-1]
        p0 += win

    U_end = U_lin_end + lam_eff * base
    return ToyTrajectory(cfg, Tn, U, U_lin, total_iter, warnings,
                         U_end=U_end, U_lin_end=U_lin_end)
