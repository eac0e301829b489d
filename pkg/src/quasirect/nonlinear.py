"""First Picard iterate of the nonlinearity: gauge sorting, kernels, bilinear limit.

The difference W = U^(1) - U^(0) of the first two iterates satisfies, on the
z-Fourier side,

    What(T, zeta) = eps^{nu+j1+j2-2} e^{iT(p(zeta)-1)/eps^2}
                    int_0^T e^{i (g - p(zeta)) s / eps^2} Ghat(s, zeta) ds,

    G(s, y) = chi(3 - 2s/T_cap) chi(y/(r eps^{iota-1}))
              U0(s, y)^j1 conj(U0)(s, y)^j2,

with g = omega + j1 - j2. The s-phase is exactly linear in s per frequency,
so the time integral is evaluated by a Filon rule (Legendre moments against
e^{i omega s}), with the smooth amplitude Ghat sampled through FFTs of the
zero-padded product field. The convolution kernel K_tau and the bilinear
packet representation of W for the completely resonant gauge live here too.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .oscquad import filon_linear_phase, gl_nodes
from .smooth import CutoffSpec
from .sources import SourceSpec
from .symbols import DispersionSymbol
from .linear_solver import LinearField
from .wavepackets import critical_points_batch, dh_k_ds, index_sets


@dataclass(frozen=True)
class NonlinearitySpec:
    lam: complex = 1.0
    j1: int = 2
    j2: int = 0
    nu: float = 0.0
    omega: float = -1.0
    iota: float = 1.0

    def __post_init__(self):
        if self.nu + self.j1 + self.j2 < 2:
            raise ValueError("need nu + j1 + j2 >= 2 (at most critical size)")
        if not (0.0 <= self.iota <= 1.0):
            raise ValueError("iota must lie in [0, 1]")

    @property
    def gauge(self) -> float:
        return self.omega + self.j1 - self.j2

    @property
    def size_exponent(self) -> float:
        return self.nu + self.j1 + self.j2 - 2.0


IOTA_MINUS = (13.0 - math.sqrt(89.0)) / 8.0


@dataclass(frozen=True)
class GaugeClass:
    g: float
    kind: str                  # non_resonant | transitional | pointwise | complete
    c_g: float
    xi_g: Optional[float] = None


def classify_gauge(spec: NonlinearitySpec, sym: DispersionSymbol,
                   xi_hi: float = 1e4, n: int = 4096) -> GaugeClass:
    """Resonance class of the gauge parameter and the gap c_g = inf |p - g|."""
    g = spec.gauge
    xi = np.geomspace(1e-3, xi_hi, n)
    sampled = float(np.min(np.abs(sym.p(xi) - g)))
    c_g = min(sampled, abs(sym.omega_inf - g), abs(g))  # p fills [0, 1)
    tol = 1e-12
    if abs(g - 1.0) <= tol:
        return GaugeClass(g, "complete", 0.0)
    if abs(g) <= tol:
        return GaugeClass(g, "transitional", 0.0)
    if 0.0 < g < 1.0:
        lo, hi = sym.params.support_edge + 1e-9, xi_hi
        while sym.p(hi) < g:
            hi *= 2.0
        for _ in range(200):
            midp = 0.5 * (lo + hi)
            if sym.p(midp) < g:
                lo = midp
            else:
                hi = midp
        return GaugeClass(g, "pointwise", 0.0, xi_g=0.5 * (lo + hi))
    return GaugeClass(g, "non_resonant", c_g)


# ----------------------------------------------------------------------------
# The convolution kernel K_tau
# ----------------------------------------------------------------------------

def kernel_K(tau: float, y: float, sym: DispersionSymbol,
             Lambda=None, rho_tail: float = 0.0, tol: float = 1e-6) -> complex:
    """K_tau(y) = int e^{-i y xi} (e^{i tau (p(xi) - 1)} - 1) Lambda(xi) dxi.

    Numeric composite rule out to Xi0 where tau(1 - p) is perturbative, then
    an asymptotic series tail using the declared decay 1 - p ~ kappa xi^{-q}
    (and Lambda ~ |xi|^{-rho_tail}); the tail cut Xi0 grows until the measured
    deviation of 1 - p from its asymptotic law is below tol.
    """
    if tau == 0.0:
        return 0.0 + 0.0j
    if Lambda is None:
        Lambda = lambda xi: np.ones_like(np.asarray(xi, dtype=float))
    q = sym.params.q
    kappa = sym.one_minus_p_coeff()

    Xi0 = max(100.0, (abs(tau) * kappa / 0.05) ** (1.0 / q))
    for _ in range(60):
        mism = abs(tau) * abs((1.0 - float(sym.p(Xi0))) - kappa * Xi0 ** (-q)) * Xi0
        if mism <= 0.1 * tol and abs(tau) * kappa * Xi0 ** (-q) <= 0.05:
            break
        Xi0 *= 1.6
    else:
        raise RuntimeError("kernel tail truncation failed: Lambda/symbol tails "
                           "incompatible with the declared exponents")

    # for y != 0 the oscillation e^{-iy xi} lets the whole tail be taken
    # numerically (IBP bound (4/y) tau kappa Xi^-q <= tol fixes the cut)
    if y != 0.0:
        Xi0 = max(Xi0, (4.0 * abs(tau) * kappa / (abs(y) * tol)) ** (1.0 / q))

    # numeric part on [-Xi0, Xi0]
    x, w = gl_nodes(12)
    # phase variation bound: |tau| * total variation of p + |y| * length
    var = abs(tau) * 1.0 + abs(y) * Xi0
    n_panels = max(8, int(math.ceil(var / math.pi)))
    edges = np.linspace(0.0, Xi0, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = edges[:-1] + half
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * np.broadcast_to(w, (n_panels, 12))).ravel()
    pz = sym.p(nodes)
    osc = np.exp(1j * tau * (pz - 1.0)) - 1.0
    # even/odd split over xi and -xi: e^{-iy xi} + e^{+iy xi} = 2 cos(y xi)
    vals = 2.0 * np.cos(y * nodes) * osc * Lambda(nodes)
    numeric = complex(np.sum(vals * wts))

    if y != 0.0:
        return numeric   # tail below tol by the IBP bound

    # series tail (y = 0): e^{i tau(p-1)} - 1 = sum_n (i tau (p-1))^n / n!
    tail = 0.0 + 0.0j
    for n_ord in (1, 2, 3):
        coef = (1j * tau * (-kappa)) ** n_ord / math.factorial(n_ord)
        nq = n_ord * q + rho_tail
        tail += coef * 2.0 * Xi0 ** (1.0 - nq) / (nq - 1.0)
    return numeric + tail


# ----------------------------------------------------------------------------
# First Picard iterate on the Fourier side
# ----------------------------------------------------------------------------

@dataclass
class PicardW:
    eps: float
    spec: NonlinearitySpec
    T: float
    zeta_pad: np.ndarray
    What: np.ndarray
    diagnostics: Dict = field(default_factory=dict)

    def at(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=float))
        dzeta = abs(self.zeta_pad[1] - self.zeta_pad[0]) if self.zeta_pad.size > 1 else 0.0
        out = np.empty(z.shape, dtype=complex)
        for i, zi in enumerate(z):
            out[i] = np.sum(self.What * np.exp(1j * zi * self.zeta_pad)) \
                * dzeta / (2.0 * math.pi)
        return out

    def on_grid(self):
        """(z_ascending, W values) on the padded grid via inverse FFT."""
        n = self.zeta_pad.size
        dzeta = abs(self.zeta_pad[1] - self.zeta_pad[0])
        vals = np.fft.ifft(self.What) * (n * dzeta / (2.0 * math.pi))
        L = math.pi / dzeta
        z = -L + (2.0 * L / n) * np.arange(n)
        return z, np.fft.fftshift(vals)

    def sup_abs(self, z_max: Optional[float] = None) -> float:
        z, vals = self.on_grid()
        keep = np.abs(z) <= z_max if z_max is not None else slice(None)
        return float(np.max(np.abs(vals[keep])))


def picard_W(eps: float, spec: NonlinearitySpec, field0: LinearField, T: float,
             tol: float = 1e-7, n_panels: int = 24, deg: int = 16,
             max_refine: int = 4, kernel: str = "full") -> PicardW:
    """W(T, .) = U^(1) - U^(0) from the linear field, spectrally exact in z.

    The amplitude Ghat(s, zeta) is sampled at Gauss-Legendre s-nodes (each
    sample is one phase-propagated inverse FFT of the linear spectrum plus a
    zero-padded product FFT), and the s-integral is a Filon rule with the
    exactly-linear phase (g - p(zeta)) s / eps^2. Panels double until two
    levels agree within tol; the monomial prefactor lam eps^{nu+j1+j2-2} and
    the outer free phase are applied at assembly.
    """
    prof = field0.src.profile
    grid = field0.grid
    sym = field0.sym
    pad = max(spec.j1 + spec.j2, 1)
    N_pad = pad * grid.N
    dz = grid.dz
    z = -grid.L + dz * np.arange(grid.N)
    chi_space = CutoffSpec().chi(z * eps ** (1.0 - spec.iota) / prof.r)
    cut = CutoffSpec()

    lo_s, hi_s = prof.T_cap, min(T, 2.0 * prof.T_cap)
    if hi_s <= lo_s:
        zeta_pad = 2.0 * math.pi * np.fft.fftfreq(N_pad, d=dz * grid.N / N_pad)
        return PicardW(eps, spec, T, zeta_pad,
                       np.zeros(N_pad, dtype=complex), {"empty_window": True})

    # padded frequency layout (product of j1+j2 fields widens the spectrum)
    zeta_pad = 2.0 * math.pi * np.fft.fftfreq(N_pad, d=dz * grid.N / N_pad)
    p_pad = sym.p(zeta_pad)
    if kernel == "full":
        omega = (spec.gauge - p_pad) / eps**2
    elif kernel == "local":
        # the space-local part W_l: identity propagator, no free phase
        omega = np.full(N_pad, (spec.gauge - 1.0) / eps**2)
    else:
        raise ValueError(f"kernel must be 'full' or 'local', got {kernel!r}")

    # products are sampled on the pad-refined grid so the squared spectrum
    # is alias-free (zero-padding by the factor j1 + j2)
    def G_hat_fine(s: float) -> np.ndarray:
        spec0 = field0.spectrum_U(s)
        buf = np.zeros(N_pad, dtype=complex)
        half = grid.N // 2
        buf[:half] = spec0[:half]
        buf[-half:] = spec0[-half:]
        U0_fine = np.fft.ifft(buf) * (N_pad * grid.dzeta / (2.0 * math.pi))
        z_fine = -grid.L + (dz * grid.N / N_pad) * np.arange(N_pad)
        U0_fine = np.roll(U0_fine, N_pad // 2)   # order as z_fine ascending
        chi_f = CutoffSpec().chi(z_fine * eps ** (1.0 - spec.iota) / prof.r)
        Gz = chi_f * U0_fine**spec.j1 * np.conj(U0_fine) ** spec.j2 \
            * float(cut.chi(3.0 - 2.0 * s / prof.T_cap))
        return np.fft.fft(np.fft.ifftshift(Gz)) * (dz * grid.N / N_pad)

    x, _ = gl_nodes(deg)

    def integral_at(n_p: int) -> np.ndarray:
        edges = np.linspace(lo_s, hi_s, n_p + 1)
        halfw = 0.5 * (edges[1] - edges[0])
        mids = edges[:-1] + halfw
        acc = np.zeros(N_pad, dtype=complex)
        panel = np.empty((1, deg, N_pad), dtype=complex)
        for ip in range(n_p):
            for iq in range(deg):
                panel[0, iq] = G_hat_fine(float(mids[ip] + halfw * x[iq]))
            lo_p, hi_p = edges[ip], edges[ip + 1]
            acc += filon_linear_phase(panel, lo_p, hi_p, omega, deg=deg)
        return acc

    refine = 0
    prev = integral_at(n_panels)
    while True:
        n_p = n_panels * (1 << (refine + 1))
        integral = integral_at(n_p)
        err = float(np.max(np.abs(integral - prev)))
        scale = float(np.max(np.abs(integral))) or 1.0
        if err <= tol * scale:
            break
        if refine >= max_refine:
            raise RuntimeError(f"picard_W time quadrature exhausted: {err/scale:.2e}")
        prev = integral
        refine += 1

    pref = spec.lam * eps ** spec.size_exponent
    if kernel == "full":
        pref = pref * np.exp(1j * T * (p_pad - 1.0) / eps**2)
    What = pref * integral
    diags = {"refine_levels": refine, "n_panels": n_p, "N_pad": N_pad}
    return PicardW(eps, spec, T, zeta_pad, What, diags)


def picard_W_split(eps: float, spec: NonlinearitySpec, field0: LinearField,
                   T: float, z, tol: float = 1e-7) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(W, W_l, W_nl) at positions z: the space-local / kernel split.

    W_l keeps only the identity part of the propagator (the integrand
    evaluated at the same position); W_nl carries the kernel correction
    (e^{i tau (p - 1)} - 1). Each part is integrated separately, so
    W = W_l + W_nl is a genuine numerical consistency check.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    W_full = picard_W(eps, spec, field0, T, tol=tol)
    grid = field0.grid
    prof = field0.src.profile
    cut = CutoffSpec()
    lo_s, hi_s = prof.T_cap, min(T, 2.0 * prof.T_cap)
    if hi_s <= lo_s:
        zero = np.zeros(z.shape, dtype=complex)
        return zero, zero.copy(), zero.copy()

    # W_l two ways: real-space sampling (here) and the spectral 'local'
    # pipeline; W_nl from the spectral split. The identity W = W_l + W_nl is
    # then a genuine two-route consistency statement.
    from .oscquad import gl_nodes
    deg, n_p = 16, 96
    x, _ = gl_nodes(deg)
    edges = np.linspace(lo_s, hi_s, n_p + 1)
    halfw = 0.5 * (edges[1] - edges[0])
    mids = edges[:-1] + halfw
    samples = np.empty((n_p, deg, z.size), dtype=complex)
    for ip in range(n_p):
        for iq in range(deg):
            s = float(mids[ip] + halfw * x[iq])
            U0 = field0.U_at(s, z)
            chi_s = cut.chi(z * eps ** (1.0 - spec.iota) / prof.r)
            samples[ip, iq] = (chi_s * U0**spec.j1 * np.conj(U0) ** spec.j2
                               * float(cut.chi(3.0 - 2.0 * s / prof.T_cap)))
    omega_l = np.full(z.size, (spec.gauge - 1.0) / eps**2)
    W_l = spec.lam * eps ** spec.size_exponent \
        * filon_linear_phase(samples, lo_s, hi_s, omega_l, deg=deg)
    W_l_spec = picard_W(eps, spec, field0, T, tol=tol, kernel="local")
    W_nl = W_full.at(z) - W_l_spec.at(z)
    W = W_full.at(z)
    return W, W_l, W_nl


# ----------------------------------------------------------------------------
# Bilinear packet representation (completely resonant gauge)
# ----------------------------------------------------------------------------

def beta_window(q: float, iota: float) -> Tuple[float, float]:
    """Admissible (lower, upper) for the pair-threshold exponent beta."""
    upper = (3.0 + iota) / 5.0
    if iota >= 0.5:
        lower = (1.0 + iota) / (q + 1.0)
    elif iota > IOTA_MINUS:
        lower = (3.0 * iota + (3.0 / iota) * (1.0 - 2.0 * iota)) / (q + 1.0)
    else:
        raise ValueError(f"iota = {iota} at or below iota_- = {IOTA_MINUS:.4f}")
    if not lower < upper:
        raise ValueError(f"empty beta window for (q, iota) = ({q}, {iota})")
    return lower, upper


@dataclass
class PacketTables:
    """Per-k data on a shared time grid t = s/eps: s_k(t, 0), derived fields."""
    ks: np.ndarray
    t_nodes: np.ndarray
    s_w: np.ndarray
    s_units: np.ndarray
    s_k: np.ndarray          # (n_k, n_t)
    dx_s_k: np.ndarray
    A0: np.ndarray           # calA_{k,0}(t, 0)
    psi0: np.ndarray         # uppsi_k(t, 0)
    exists: np.ndarray


def packet_tables(eps: float, sym: DispersionSymbol, src: SourceSpec,
                  ks: np.ndarray, lo_s: float, hi_s: float,
                  n_panels: int = 96, deg: int = 12) -> PacketTables:
    gamma = src.gamma
    x, w = gl_nodes(deg)
    edges = np.linspace(lo_s, hi_s, n_panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    mids = edges[:-1] + half
    s_units = (mids[:, None] + half * x[None, :]).ravel()
    s_w = np.tile(w * half, n_panels)
    t_nodes = s_units / eps

    n_k, n_t = len(ks), len(t_nodes)
    s_k = np.empty((n_k, n_t))
    dxs = np.empty((n_k, n_t))
    A0 = np.empty((n_k, n_t), dtype=complex)
    psi0 = np.empty((n_k, n_t))
    exists = np.empty((n_k, n_t), dtype=bool)
    for i, k in enumerate(ks):
        k = int(k)
        sk, ex = critical_points_batch(sym, gamma, k, t_nodes, x=0.0)
        exists[i] = ex
        sk = np.where(ex, sk, 0.0)
        s_k[i] = sk
        xi = k * math.pi + sk
        dxs[i] = 1.0 / dh_k_ds(sym, gamma, k, t_nodes, sk)
        sgn = 1.0 if k % 2 == 0 else -1.0
        y_k = 1.0 - sym.p(xi) - sgn * gamma * np.sin(sk)
        det = -sgn * gamma * np.cos(sk) - (xi - t_nodes) * sym.d2p(xi) \
            - 2.0 * sym.dp(xi)
        amp = src.zeta.zeta(1, xi) * src.a_m(1, eps * xi, xi, y_k)
        A0[i] = ((2.0 * math.pi) ** 1.5 * np.exp(-1j * sgn * math.pi / 4.0)
                 / np.sqrt(np.abs(det)) * amp) * ex
        psi0[i] = (sgn * gamma * np.cos(sk)
                   + (1.0 - sym.p(xi)) * (xi - t_nodes)) * ex
    return PacketTables(ks=np.asarray(ks), t_nodes=t_nodes, s_w=s_w,
                        s_units=s_units, s_k=s_k, dx_s_k=dxs, A0=A0,
                        psi0=psi0, exists=exists)


def taylor_phases_p01(sym: DispersionSymbol, src: SourceSpec, k1: int, k2: int,
                      t: float) -> Tuple[float, float]:
    """(p0, p1): the constant and linear x-Taylor coefficients of
    uppsi_{k1} + uppsi_{k2} at x = 0."""
    gamma = src.gamma
    p0 = 0.0
    p1 = -(k1 + k2) * math.pi
    for k in (k1, k2):
        sk, ex = critical_points_batch(sym, gamma, int(k), np.array([t]), x=0.0)
        if not ex[0]:
            raise ValueError(f"no critical point at x=0 for k={k}, t={t}")
        s = float(sk[0])
        xi = k * math.pi + s
        sgn = 1.0 if k % 2 == 0 else -1.0
        dxs = 1.0 / float(dh_k_ds(sym, gamma, k, t, s))
        p0 += sgn * gamma * math.cos(s) + (1.0 - float(sym.p(xi))) * (xi - t)
        p1 += (-s - sgn * gamma * dxs * math.sin(s)
               + (1.0 - float(sym.p(xi))) * dxs
               - float(sym.dp(xi)) * dxs * (xi - t))
    return p0, p1


def bilinear_W(eps: float, sym: DispersionSymbol, src: SourceSpec,
               spec: NonlinearitySpec, T: float, z: float,
               beta: Optional[float] = None,
               tables: Optional[PacketTables] = None) -> complex:
    """Packet-pair representation of W(T, z) for the resonant gauge.

    Sum over retained pairs (k1 + k2 > c eps^{-beta}, both in K_s^c) of the
    single time integral with phases p0/eps + z p1 + (T-s)(p(p1)-1)/eps^2 and
    the product amplitude (A_{k1,0} A_{k2,0})(s/eps, 0). beta defaults to the
    midpoint of the admissible window and is validated against it.
    """
    if spec.gauge != 1.0:
        raise ValueError("bilinear representation applies to the resonant gauge g = 1")
    lo_b, hi_b = beta_window(sym.params.q, spec.iota)
    beta = 0.5 * (lo_b + hi_b) if beta is None else beta
    if not (lo_b < beta < hi_b):
        raise ValueError(f"beta = {beta} outside the admissible window ({lo_b:.4f}, {hi_b:.4f})")

    sets = index_sets(eps, sym, src)
    ks = sets.K_s()
    lo_s, hi_s = src.profile.T_cap, min(T, 2.0 * src.profile.T_cap)
    if hi_s <= lo_s:
        return 0.0 + 0.0j
    tab = tables if tables is not None else packet_tables(eps, sym, src, ks, lo_s, hi_s)
    cut = CutoffSpec()
    chi_t = cut.chi(3.0 - 2.0 * tab.s_units / src.profile.T_cap)
    thresh = sets.c * eps ** (-beta)

    k_index = {int(k): i for i, k in enumerate(tab.ks)}
    gamma = src.gamma
    total_terms = []
    pref = eps**2 / (2.0 * math.pi) ** 2 * cmath.exp(-2j * gamma / eps) \
        * spec.lam * eps ** spec.size_exponent
    sgns = np.where(tab.ks % 2 == 0, 1.0, -1.0)
    for i1, k1 in enumerate(tab.ks):
        for i2 in range(i1, len(tab.ks)):
            k2 = tab.ks[i2]
            if k1 + k2 <= thresh:
                continue
            live = tab.exists[i1] & tab.exists[i2]
            if not live.any():
                continue
            mult = 1.0 if i1 == i2 else 2.0
            p0 = tab.psi0[i1] + tab.psi0[i2]
            p1 = (-(k1 + k2) * math.pi
                  - tab.s_k[i1] - sgns[i1] * gamma * tab.dx_s_k[i1] * np.sin(tab.s_k[i1])
                  + (1.0 - sym.p(k1 * math.pi + tab.s_k[i1])) * tab.dx_s_k[i1]
                  - sym.dp(k1 * math.pi + tab.s_k[i1]) * tab.dx_s_k[i1]
                  * (k1 * math.pi + tab.s_k[i1] - tab.t_nodes)
                  - tab.s_k[i2] - sgns[i2] * gamma * tab.dx_s_k[i2] * np.sin(tab.s_k[i2])
                  + (1.0 - sym.p(k2 * math.pi + tab.s_k[i2])) * tab.dx_s_k[i2]
                  - sym.dp(k2 * math.pi + tab.s_k[i2]) * tab.dx_s_k[i2]
                  * (k2 * math.pi + tab.s_k[i2] - tab.t_nodes))
            phase = (p0 / eps + z * p1
                     + (T - tab.s_units) * (sym.p(p1) - 1.0) / eps**2)
            integrand = np.where(live, chi_t * np.exp(1j * phase)
                                 * tab.A0[i1] * tab.A0[i2], 0.0)
            total_terms.append(mult * np.sum(integrand * tab.s_w))
    from .oscquad import compensated_sum
    return complex(pref * compensated_sum(np.asarray(total_terms, dtype=complex))) \
        if total_terms else 0.0 + 0.0j
