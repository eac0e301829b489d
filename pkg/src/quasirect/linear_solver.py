"""Spectral Duhamel oracle for the linear dispersive equation with oscillating source.

The equation (source on the right-hand side, so the filtered toy model,
the packet formulas and the limit profiles all share one global sign)

    d_t u - (i/eps) p(eps D_x) u = eps^{3/2} sum_m zeta_m-quantized[a_m e^{i m phi/eps}]

is diagonal on the Fourier side. Because phi is linear in x at fixed time,
the spatial transform of each harmonic is exactly rho_hat evaluated at a
drifting frequency, so each mode reduces to a 1-D oscillatory time integral
per frequency:

    uhat^m(t, xi) = eps^{3/2} * int_0^t e^{i(t-s)p(eps xi)/eps} zeta_m(-eps xi)
                    e^{i m (s + gamma(cos s - 1))/eps} theta(eps s) pi_m(s)
                    rho_hat(xi + m s/eps) ds.

Everything is organized in the rescaled variables (T, z) = (eps t, x/eps):
the stored spectrum is the z-transform of the filtered field
U(T, z) = (1/eps) e^{-iT/eps^2} u(T/eps, eps z), whose z-frequencies are
zeta = eps xi. The emission support (theta and the rho_hat window) is
compact, so one emission integral per frequency at t0 = T_cap/eps is exact
for all later times via the free phase factor.

Reductions run in deterministic frequency order; FieldSample objects are
immutable once emitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from .oscquad import gl_nodes
from .sources import SourceSpec
from .symbols import DispersionSymbol


def _next_pow2(n: float) -> int:
    return 1 << int(math.ceil(math.log2(max(n, 2.0))))


@dataclass(frozen=True)
class FourierGrid:
    """Periodic z-domain [-L, L] with N modes; zeta_j = pi j / L.

    The cap xi_max bounds the retained |zeta| (the resonant mode fills
    |zeta| <= T_cap/eps + O(1), so the default cap T_cap/eps + 14 reproduces
    the reference value 64 at eps = 1/50, T_cap = 1).
    """
    L: float
    N: int
    xi_max: float
    eps: float

    def __post_init__(self):
        if self.N & (self.N - 1):
            raise ValueError("N must be a power of two")
        if self.zeta_nyquist < self.xi_max:
            raise ValueError(
                f"grid cannot resolve the frequency cap: pi N/(2L) = "
                f"{self.zeta_nyquist:.1f} < xi_max = {self.xi_max:.1f}")

    @property
    def dz(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def dzeta(self) -> float:
        return math.pi / self.L

    @property
    def zeta_nyquist(self) -> float:
        return math.pi * self.N / (2.0 * self.L)

    def zeta(self) -> np.ndarray:
        """Frequencies in FFT layout (0, ..., +max, -max, ..., -dzeta)."""
        return 2.0 * math.pi * np.fft.fftfreq(self.N, d=self.dz)

    def z(self) -> np.ndarray:
        return -self.L + self.dz * np.arange(self.N)


def default_grid(eps: float, src: SourceSpec, L: Optional[float] = None,
                 N: Optional[int] = None, xi_max: Optional[float] = None,
                 max_harmonic: int = 1) -> FourierGrid:
    """Auto-sized grid: contains the emitted field, resolves every live mode.

    The frequency cap covers the emission band |zeta| <= |m| T_cap/eps plus
    the spectral width of the spatial profile (eps * width of rho_hat at the
    1e-7 level), reproducing the reference value ~64 at eps = 1/50 for the
    narrow profile.
    """
    T_cap = src.profile.T_cap
    if xi_max is None:
        tail = eps * src.rho_hat().effective_width(rel=1e-7)
        xi_max = abs(max_harmonic) * (T_cap / eps + math.pi + tail) + 10.0
    if L is None:
        L = max(8.0, 4.0 * math.ceil((src.profile.r + 0.10) / eps / 4.0))
    if N is None:
        N = max(1 << 11, _next_pow2(1.25 * 2.0 * L * (xi_max + 10.0) / math.pi))
    return FourierGrid(L=float(L), N=int(N), xi_max=float(xi_max), eps=eps)


@dataclass(frozen=True)
class ModeSpectrum:
    """Emission integral of one harmonic, frozen at the end of emission.

    spectrum(T) returns the z-transform of e^{-iT/eps^2} u^m(T/eps, eps z)/eps
    on grid.zeta(); emission(zeta) stores
        E(zeta) = int e^{-i s p(zeta)/eps} (source factors)(s, zeta) ds
    so that uhat(t) = eps^{3/2} e^{i t p(zeta)/eps} zeta_m(-zeta) E(zeta).
    """
    m: int
    grid: FourierGrid
    emission: np.ndarray
    t0: float
    sym: DispersionSymbol
    src: SourceSpec
    diagnostics: Dict[str, float]

    def spectrum(self, T: float) -> np.ndarray:
        eps = self.grid.eps
        t = T / eps
        if t < self.t0:
            raise ValueError(f"mode frozen at t0={self.t0}; asked t={t}")
        zeta = self.grid.zeta()
        pz = self.sym.p(zeta)
        # exp(i[t p(zeta) - t]/eps) = exp(i T (p-1)/eps^2): split for accuracy
        phase = np.exp(1j * (T * (pz - 1.0) / eps**2))
        zmul = self.src.zeta.zeta(self.m, -zeta)
        return (eps ** 1.5 / eps**2) * phase * zmul * self.emission


def solve_linear_mode(eps: float, sym: DispersionSymbol, src: SourceSpec,
                      m: int, grid: FourierGrid, tol: float = 1e-9,
                      n_pp: int = 12, chunk: int = 2048) -> ModeSpectrum:
    """Emission integral of harmonic m on the grid, exact in structure.

    Per frequency the integrand is supported on the intersection of the
    theta-window [T_lo/eps, T_cap/eps] with the rho_hat window
    |zeta + m s| <= eps * W (m != 0); panels carry >= n_pp Gauss-Legendre
    nodes per 2*pi of phase variation, with a two-level refinement check on
    sampled frequencies. Raises if the refinement budget is exhausted.
    """
    prof = src.profile
    gamma = src.gamma
    rho_hat = src.rho_hat()
    # spectral window of rho: keep |zeta + m s| <= eps * W_eff (the dropped
    # tail contributes below 1e-9 of the emission scale)
    W_eff = rho_hat.effective_width(rel=1e-9)
    zeta_full = grid.zeta()
    t_lo = prof.T_lo / eps
    t_hi = prof.T_cap / eps
    emission = np.zeros(grid.N, dtype=complex)

    def windows(zl: np.ndarray):
        if m != 0:
            edges = np.stack([(-zl - eps * W_eff) / m, (-zl + eps * W_eff) / m])
            lo = np.maximum(edges.min(axis=0), t_lo)
            hi = np.minimum(edges.max(axis=0), t_hi)
        else:
            lo = np.full(zl.shape, t_lo)
            hi = np.full(zl.shape, t_hi)
        return lo, np.maximum(hi, lo)

    def rate_of(zl: np.ndarray):
        # |d/ds phase| = |m - p(zeta) - m gamma sin s| <= |m - p| + |m| gamma
        return (np.abs(m - sym.p(zl)) + abs(m) * gamma) / eps

    # phase: -s p(zeta)/eps + m(s + gamma(cos s - 1))/eps
    def emission_chunk(zl: np.ndarray, n_panels: int) -> np.ndarray:
        lo, hi = windows(zl)
        length = hi - lo
        out = np.zeros(zl.shape, dtype=complex)
        live = length > 0.0
        if not live.any():
            return out
        zl_l, lo_l, hi_l = zl[live], lo[live], hi[live]
        x, w = gl_nodes(12)
        k = np.arange(n_panels)
        offs = (k[:, None] + 0.5 * (x[None, :] + 1.0)) / n_panels
        s = lo_l[:, None, None] + (hi_l - lo_l)[:, None, None] * offs[None, :, :]
        pz = sym.p(zl_l)[:, None, None]
        phase = (-s * pz + m * (s + gamma * (np.cos(s) - 1.0))) / eps
        amp = (prof.theta(eps * s) * prof.pi_m(m, s)
               * rho_hat((zl_l[:, None, None] + m * s) / eps))
        vals = amp * np.exp(1j * phase)
        panel = (vals * w[None, None, :]).sum(axis=2)
        half = (hi_l - lo_l) / (2.0 * n_panels)
        out[live] = panel.sum(axis=1) * half
        return out

    def run_pass(idx: np.ndarray, refine: int = 0) -> np.ndarray:
        """Rate-sorted chunking: frequencies with similar phase variation
        share a panel count; per-frequency results are order-independent."""
        lo, hi = windows(zeta_full[idx])
        var = rate_of(zeta_full[idx]) * (hi - lo)
        order = np.argsort(var, kind="stable")
        out = np.zeros(idx.size, dtype=complex)
        pos = 0
        budget = 30_000_000
        while pos < idx.size:
            take = order[pos:pos + chunk]
            n_panels = max(2, int(math.ceil(float(var[take].max())
                                            / (2.0 * math.pi) * n_pp / 12.0)))
            n_panels <<= refine
            take = take[: max(16, min(chunk, budget // (12 * n_panels)))]
            out[take] = emission_chunk(zeta_full[idx[take]], n_panels)
            pos += take.size
        return out

    keep = np.abs(zeta_full) <= grid.xi_max
    idx = np.nonzero(keep)[0]
    emission[idx] = run_pass(idx)

    # two-level check on a deterministic frequency sample
    probe = idx[:: max(1, idx.size // 64)]
    if probe.size:
        ref = run_pass(probe, refine=1)
        resid = np.max(np.abs(ref - emission[probe]))
        scale = max(np.max(np.abs(emission[probe])), 1e-300)
        # the absolute floor covers non-resonant modes whose emission is
        # pure cancellation noise far below any relative scale
        if resid > max(tol * scale, 1e-12):
            raise RuntimeError(
                f"quadrature budget insufficient for mode {m}: two-level "
                f"residual {resid:.2e} (worst zeta "
                f"{zeta_full[probe[int(np.argmax(np.abs(ref - emission[probe])))]]:.2f})")
        quad_resid = float(resid / scale) if scale > 0 else 0.0
    else:
        quad_resid = 0.0

    diags = {"quad_two_level_rel": quad_resid,
             "n_frequencies": int(idx.size)}
    return ModeSpectrum(m=m, grid=grid, emission=emission, t0=t_hi,
                        sym=sym, src=src, diagnostics=diags)


@dataclass(frozen=True)
class FieldSample:
    """Values of the filtered field on a (T, z) set, with provenance."""
    eps: float
    T: float
    z: np.ndarray
    values: np.ndarray
    solver: str                  # oracle | packets | asymptotic
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.all(np.isfinite(self.values.view(float))):
            raise ValueError("non-finite field values")


class LinearField:
    """Assembled linear solution: sum of harmonics, sampled anywhere."""

    def __init__(self, eps: float, sym: DispersionSymbol, src: SourceSpec,
                 grid: Optional[FourierGrid] = None,
                 harmonics: Optional[Sequence[int]] = None,
                 tol: float = 1e-9, n_pp: int = 12):
        self.eps = eps
        self.sym = sym
        self.src = src
        hs = tuple(harmonics if harmonics is not None else src.harmonics)
        self.grid = grid or default_grid(eps, src, max_harmonic=max(abs(h) for h in hs))
        self.modes = {m: solve_linear_mode(eps, sym, src, m, self.grid, tol=tol,
                                           n_pp=n_pp)
                      for m in hs}

    def spectrum_U(self, T: float, harmonics: Optional[Iterable[int]] = None) -> np.ndarray:
        """z-transform of U(T, .) on grid.zeta() (deterministic mode order)."""
        out = np.zeros(self.grid.N, dtype=complex)
        for m in sorted(self.modes if harmonics is None else harmonics):
            out += self.modes[m].spectrum(T)
        return out

    def U_on_grid(self, T: float, harmonics: Optional[Iterable[int]] = None) -> np.ndarray:
        """U(T, z) on grid.z() via inverse FFT."""
        spec = self.spectrum_U(T, harmonics)
        n = self.grid.N
        vals = np.fft.ifft(spec) * (n * self.grid.dzeta / (2.0 * math.pi))
        # grid.z() starts at -L: ifft yields values at z = 0..2L, reorder
        return np.fft.fftshift(vals)

    def U_at(self, T: float, z, harmonics: Optional[Iterable[int]] = None) -> np.ndarray:
        """U(T, z) at arbitrary positions by direct (type-2) transform."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        spec = self.spectrum_U(T, harmonics)
        zeta = self.grid.zeta()
        out = np.empty(z.shape, dtype=complex)
        for i, zi in enumerate(z):
            out[i] = np.sum(spec * np.exp(1j * zi * zeta)) * self.grid.dzeta / (2.0 * math.pi)
        return out

    def u_at(self, t: float, x, harmonics: Optional[Iterable[int]] = None) -> np.ndarray:
        """Physical field u(t, x) = eps e^{it/eps} U(eps t, x/eps)."""
        T = self.eps * t
        z = np.asarray(x, dtype=float) / self.eps
        return self.eps * np.exp(1j * t / self.eps) * self.U_at(T, z, harmonics)

    def sample(self, T: float, z) -> FieldSample:
        z = np.atleast_1d(np.asarray(z, dtype=float))
        vals = self.U_at(T, z)
        return FieldSample(self.eps, T, z, vals, "oracle", meta=self.diagnostics(T))

    # -- diagnostics ---------------------------------------------------------
    def diagnostics(self, T: float) -> Dict:
        spec = self.spectrum_U(T)
        vals = np.abs(self.U_on_grid(T))
        n_edge = max(4, self.grid.N // 20)
        peak = float(vals.max())
        trunc = float(max(vals[:n_edge].max(), vals[-n_edge:].max()) / peak) if peak else 0.0
        zeta = np.abs(self.grid.zeta())
        tail_band = zeta > 0.95 * grid_cap(self.grid)
        stail = float(np.max(np.abs(spec[tail_band])) / max(np.max(np.abs(spec)), 1e-300)) \
            if tail_band.any() else 0.0
        return {"truncation_rel": trunc, "spectral_tail_rel": stail,
                "grid_L": self.grid.L, "grid_N": self.grid.N,
                "xi_max": self.grid.xi_max}

    def check_containment(self, T: float, tol: float = 1e-6) -> None:
        d = self.diagnostics(T)
        if d["truncation_rel"] > tol:
            raise RuntimeError(f"field reaches the domain edge: {d['truncation_rel']:.2e}")
        if d["spectral_tail_rel"] > tol:
            raise RuntimeError(f"aliasing sentinel: spectral tail {d['spectral_tail_rel']:.2e}")

    def l2_norms(self, T: float, orders=(0, 1, 2)) -> Dict[int, float]:
        """||d_x^n u(t, .)||_{L2(dx)} from the spectrum (Parseval)."""
        spec = self.spectrum_U(T)
        zeta = self.grid.zeta()
        out = {}
        for n in orders:
            w = np.abs(spec) ** 2 * np.abs(zeta) ** (2 * n)
            mass = np.sum(w) * self.grid.dzeta / (2.0 * math.pi)
            out[n] = float(math.sqrt(mass) * self.eps ** (1.5 - n))
        return out


def grid_cap(grid: FourierGrid) -> float:
    return min(grid.xi_max, grid.zeta_nyquist)


def rescale_to_U(eps: float, t: float, x: np.ndarray, u: np.ndarray):
    """(t, x, u) -> (T, z, U): U = (1/eps) e^{-iT/eps^2} u, T = eps t, z = x/eps."""
    T = eps * t
    z = np.asarray(x, dtype=float) / eps
    U = np.asarray(u, dtype=complex) * np.exp(-1j * T / eps**2) / eps
    return T, z, U


def rescale_to_u(eps: float, T: float, z: np.ndarray, U: np.ndarray):
    """Inverse of rescale_to_U (exact algebra, bijective)."""
    t = T / eps
    x = np.asarray(z, dtype=float) * eps
    u = np.asarray(U, dtype=complex) * np.exp(1j * T / eps**2) * eps
    return t, x, u
