"""Per-packet machinery: critical points, Hessians, stationary-phase packets, sums.

A packet with index k is emitted near time k*pi. Its critical point
(s_k, y_k, xi_k) solves, inside Upsilon = {|s| <= 2pi/3, |y| <= r, |s-xi| <= 1/4},

    xi = s,
    y  = 1 - p(k pi + s) - (-1)^k gamma sin s,
    x  = h_k(t; s) := y - (k pi + s - t) p'(k pi + s),

with |s_k| < pi/3 and |d_s h_k| >= gamma/4 there, so a bracketed Newton on
h_k(t; .) - x is safe. The packet value is

    u_k = eps^2 b_k e^{i Psi_k / eps},
    b_k = sqrt(2 pi) e^{-i (-1)^k pi/4} |det S_k|^{-1/2} zeta(k pi + s_k)
          * a(eps(k pi + s_k), k pi + s_k, y_k),
    Psi_k = -gamma + t + (-1)^k gamma cos s_k
            + (1 - p(k pi + s_k)) (k pi + s_k - t) - (k pi + s_k) x,

where S_k is the exact 3x3 Hessian of the packet phase. The filtered field is
U(T, z) = e^{-iT/eps^2} sum_k u_k / eps over the almost-stationary index set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .oscquad import compensated_sum
from .sources import SourceSpec
from .symbols import DispersionSymbol


# ----------------------------------------------------------------------------
# Index-set constants
# ----------------------------------------------------------------------------

def delta0(sym: DispersionSymbol, eta_hi: float = 1e3, n: int = 4096) -> float:
    """min over [3/4, eta_hi] of eta^{q+1} p'(eta) (positive by hypothesis)."""
    eta = np.geomspace(0.75, eta_hi, n)
    vals = eta ** (sym.params.q + 1.0) * sym.dp(eta)
    return float(np.min(vals))


def dispersive_constant(sym: DispersionSymbol, T_cap: float, r: float,
                        R: Optional[float] = None) -> float:
    """c = (1/2pi) * (delta0 T_cap / (2 (delta0 + r + R)))^(1/(q+1)), R = r."""
    R = r if R is None else R
    d0 = delta0(sym)
    q = sym.params.q
    return (d0 * T_cap / (2.0 * (d0 + r + R))) ** (1.0 / (q + 1.0)) / (2.0 * math.pi)


def stationary_constant(sym: DispersionSymbol, T_cap: float, r: float,
                        gamma: float, margin: float = 0.02) -> float:
    """Smallest c1 for which every k in K_s^{c1} is guaranteed a critical point.

    From the intermediate-value argument: the drift (t - k pi) p'(k pi) must
    stay below gamma*sin(pi/3) - r - margin for all t <= 2 T_cap/eps, i.e.
    k >= ((2 T_cap sup eta^{q+1} p') / (gamma sqrt(3)/2 - r - margin))^{1/(q+1)} / pi.
    Returned as max with 4c (the reference default).
    """
    eta = np.geomspace(0.75, 1e4, 4096)
    sup = float(np.max(eta ** (sym.params.q + 1.0) * sym.dp(eta))) * 1.05
    room = gamma * math.sqrt(3.0) / 2.0 - r - margin
    if room <= 0:
        raise ValueError("r too close to gamma sin(pi/3); no stationary window")
    c1 = (2.0 * T_cap * sup / room) ** (1.0 / (sym.params.q + 1.0)) / math.pi
    return max(c1, 4.0 * dispersive_constant(sym, T_cap, r))


@dataclass(frozen=True)
class PacketIndexSets:
    """K = K_d (dispersive) | K_s (almost stationary), with the c1 refinement."""
    eps: float
    q: float
    c: float
    c1: float
    T_cap: float

    @property
    def k_max(self) -> int:
        return int(math.floor(2.0 / 3.0 + self.T_cap / (math.pi * self.eps)))

    @property
    def k_dispersive_max(self) -> float:
        return self.c * self.eps ** (-1.0 / (self.q + 1.0))

    @property
    def k_stationary_min(self) -> int:
        return int(math.floor(self.k_dispersive_max)) + 1

    @property
    def k_confirmed_min(self) -> int:
        """First k of K_s^{c1} (critical point guaranteed)."""
        return int(math.floor(self.c1 * self.eps ** (-1.0 / (self.q + 1.0)))) + 1

    def K(self) -> np.ndarray:
        return np.arange(0, self.k_max + 1)

    def K_d(self) -> np.ndarray:
        k = self.K()
        return k[k <= self.k_dispersive_max]

    def K_s(self) -> np.ndarray:
        k = self.K()
        return k[k > self.k_dispersive_max]

    def K_s_confirmed(self) -> np.ndarray:
        k = self.K()
        return k[k >= self.k_confirmed_min]

    def K_transition(self) -> np.ndarray:
        k = self.K_s()
        return k[k < self.k_confirmed_min]


def index_sets(eps: float, sym: DispersionSymbol, src: SourceSpec,
               c: Optional[float] = None, c1: Optional[float] = None) -> PacketIndexSets:
    T_cap, r, gamma = src.profile.T_cap, src.profile.r, src.gamma
    c = dispersive_constant(sym, T_cap, r) if c is None else c
    c1 = stationary_constant(sym, T_cap, r, gamma) if c1 is None else c1
    return PacketIndexSets(eps=eps, q=sym.params.q, c=c, c1=c1, T_cap=T_cap)


# ----------------------------------------------------------------------------
# Critical points
# ----------------------------------------------------------------------------

def h_k(sym: DispersionSymbol, gamma: float, k, t, s):
    """Detection position x = h_k(t; s)."""
    k = np.asarray(k)
    s = np.asarray(s, dtype=float)
    xi = k * math.pi + s
    sgn = np.where(k % 2 == 0, 1.0, -1.0)
    return 1.0 - sym.p(xi) - sgn * gamma * np.sin(s) - (xi - t) * sym.dp(xi)


def dh_k_ds(sym: DispersionSymbol, gamma: float, k, t, s):
    k = np.asarray(k)
    s = np.asarray(s, dtype=float)
    xi = k * math.pi + s
    sgn = np.where(k % 2 == 0, 1.0, -1.0)
    return -2.0 * sym.dp(xi) - (xi - t) * sym.d2p(xi) - sgn * gamma * np.cos(s)


@dataclass(frozen=True)
class CriticalPoint:
    k: int
    t: float
    x: float
    s: float
    y: float
    xi: float
    exists: bool
    residual: float = 0.0


_S_EDGE = math.pi / 3.0


def find_critical_point(sym: DispersionSymbol, gamma: float, k: int, t: float,
                        x: float, tol: float = 1e-12, max_iter: int = 50) -> CriticalPoint:
    """Bracketed Newton for s in (-pi/3, pi/3) with h_k(t; s) = x.

    h_k(t; .) is strictly monotone there (|d_s h_k| >= gamma/4), so the root
    is unique when x lies between the endpoint values; otherwise exists=False.
    """
    lo, hi = -_S_EDGE, _S_EDGE
    f_lo = float(h_k(sym, gamma, k, t, lo)) - x
    f_hi = float(h_k(sym, gamma, k, t, hi)) - x
    if f_lo == 0.0:
        s = lo
    elif f_hi == 0.0:
        s = hi
    elif f_lo * f_hi > 0.0:
        return CriticalPoint(k, t, x, math.nan, math.nan, math.nan, False)
    else:
        s = 0.5 * (lo + hi)
        for _ in range(max_iter):
            f = float(h_k(sym, gamma, k, t, s)) - x
            if abs(f) <= tol:
                break
            if (f > 0.0) == (f_hi > 0.0):
                hi = s
            else:
                lo = s
            d = float(dh_k_ds(sym, gamma, k, t, s))
            cand = s - f / d if d != 0.0 else 0.5 * (lo + hi)
            s = cand if lo < cand < hi else 0.5 * (lo + hi)
        else:
            raise RuntimeError(f"critical-point Newton stalled at k={k}, t={t}, x={x}")
    xi = k * math.pi + s
    sgn = 1.0 if k % 2 == 0 else -1.0
    y = 1.0 - float(sym.p(xi)) - sgn * gamma * math.sin(s)
    resid = abs(float(h_k(sym, gamma, k, t, s)) - x)
    return CriticalPoint(k, t, x, s, y, s, True, resid)


def critical_points_batch(sym: DispersionSymbol, gamma: float, k: int,
                          t: np.ndarray, x: float = 0.0, tol: float = 1e-12):
    """Vectorized bracketed Newton over many times t for one k.

    Returns (s, exists): s is nan where no root lies in (-pi/3, pi/3).
    """
    t = np.asarray(t, dtype=float)
    f_lo = h_k(sym, gamma, k, t, np.full_like(t, -_S_EDGE)) - x
    f_hi = h_k(sym, gamma, k, t, np.full_like(t, _S_EDGE)) - x
    exists = f_lo * f_hi <= 0.0
    lo = np.full_like(t, -_S_EDGE)
    hi = np.full_like(t, _S_EDGE)
    s = np.zeros_like(t)
    increasing = f_hi > f_lo
    for _ in range(80):
        f = h_k(sym, gamma, k, t, s) - x
        too_hi = (f > 0.0) == increasing
        hi = np.where(too_hi, s, hi)
        lo = np.where(~too_hi, s, lo)
        d = dh_k_ds(sym, gamma, k, t, s)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = s - f / d
        bad = ~((cand > lo) & (cand < hi))
        cand = np.where(bad, 0.5 * (lo + hi), cand)
        if np.all(np.abs(f[exists]) <= tol) if exists.any() else True:
            break
        s = cand
    s = np.where(exists, s, np.nan)
    return s, exists


def s_k_asymptotic(sym: DispersionSymbol, gamma: float, k: int, t: float,
                   x: float) -> float:
    """Closed-form critical time s_k = (-1)^{k+1} arcsin((x - tau_k^0)/gamma).

    tau_k^0(t) = 1 - p(k pi) - (k pi - t) p'(k pi). Raises when the arcsin
    argument leaves [-1, 1] (asymptotics inapplicable at this (k, t, x)).
    """
    kp = k * math.pi
    tau0 = 1.0 - float(sym.p(kp)) - (kp - t) * float(sym.dp(kp))
    arg = (x - tau0) / gamma
    if abs(arg) > 1.0:
        raise ValueError(f"asymptotics inapplicable at (k={k}, t={t}, x={x}): "
                         f"arcsin argument {arg:.3f}")
    return (-1.0) ** (k + 1) * math.asin(arg)


def tau_k0(sym: DispersionSymbol, k, t):
    kp = np.asarray(k) * math.pi
    return 1.0 - sym.p(kp) - (kp - np.asarray(t, dtype=float)) * sym.dp(kp)


# ----------------------------------------------------------------------------
# Hessian and packet values
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class WavePacket:
    cp: CriticalPoint
    detS: float
    signature: int
    b: complex
    psi: float
    value: complex


def hessian_Sk(sym: DispersionSymbol, gamma: float, cp: CriticalPoint,
               det_floor: float = 1e-6):
    """Exact 3x3 Hessian of the packet phase at the critical point.

    Entries: [[(-1)^k gamma cos s, 1, p'], [1, 0, -1], [p', -1, (k pi + s - t) p'']].
    Determinant by direct expansion; signature from the eigenvalue signs
    (always (-1)^k, two positive eigenvalues for even k).
    """
    if not cp.exists:
        raise ValueError("no critical point for this (k, t, x)")
    xi = cp.k * math.pi + cp.xi
    sgn = 1.0 if cp.k % 2 == 0 else -1.0
    a = sgn * gamma * math.cos(cp.s)
    b = float(sym.dp(xi))
    c = (cp.k * math.pi + cp.s - cp.t) * float(sym.d2p(xi))
    S = np.array([[a, 1.0, b], [1.0, 0.0, -1.0], [b, -1.0, c]])
    det = -a - c - 2.0 * b
    if abs(det) < det_floor:
        raise RuntimeError(
            f"|det S_k| = {abs(det):.2e} below floor at k={cp.k}: "
            "uniform non-degeneracy violated")
    signs = np.sign(np.linalg.eigvalsh(S))
    signature = int(np.sum(signs))
    return S, det, signature


def packet_psi(sym: DispersionSymbol, gamma: float, cp: CriticalPoint) -> float:
    xi = cp.k * math.pi + cp.s
    sgn = 1.0 if cp.k % 2 == 0 else -1.0
    return (-gamma + cp.t + sgn * gamma * math.cos(cp.s)
            + (1.0 - float(sym.p(xi))) * (xi - cp.t) - xi * cp.x)


def packet_u_k(eps: float, sym: DispersionSymbol, src: SourceSpec,
               cp: CriticalPoint) -> WavePacket:
    """Stationary-phase leading term of one packet, u_k = eps^2 b_k e^{i Psi/eps}."""
    _, det, signature = hessian_Sk(sym, src.gamma, cp)
    xi = cp.k * math.pi + cp.s
    sgn = 1.0 if cp.k % 2 == 0 else -1.0
    amp = (float(src.zeta.zeta(1, xi))
           * float(src.a_m(1, eps * xi, xi, cp.y)))
    b = math.sqrt(2.0 * math.pi) * np.exp(-1j * sgn * math.pi / 4.0) \
        / math.sqrt(abs(det)) * amp
    psi = packet_psi(sym, src.gamma, cp)
    value = eps**2 * b * np.exp(1j * psi / eps)
    return WavePacket(cp=cp, detS=det, signature=signature, b=b, psi=psi, value=value)


@dataclass
class PacketSum:
    U: complex
    packets: list
    n_live: int
    n_dropped_transition: int


def sum_packets(eps: float, sym: DispersionSymbol, src: SourceSpec,
                T: float, z: float, sets: Optional[PacketIndexSets] = None,
                keep_packets: bool = False) -> PacketSum:
    """Filtered packet sum U(T, z) = e^{-iT/eps^2} sum_k u_k / eps.

    k runs over K_s^{c1}, where detection is guaranteed (a missing critical
    point there is a hard error: it means c1 is mis-tuned), plus the
    transition zone, where a packet is kept when its critical point exists
    and dropped otherwise.
    Deterministic ascending-k order with exactly-rounded accumulation.
    """
    t = T / eps
    x = eps * z
    if abs(x) > src.profile.r:
        raise ValueError(f"|eps z| = {abs(x):.4f} outside the profile support r")
    sets = sets or index_sets(eps, sym, src)
    gamma = src.gamma
    values = []
    packets = []
    dropped = 0
    for k in np.concatenate([sets.K_transition(), sets.K_s_confirmed()]):
        k = int(k)
        cp = find_critical_point(sym, gamma, k, t, x)
        if not cp.exists:
            if k >= sets.k_confirmed_min:
                raise RuntimeError(
                    f"missing critical point at k={k} in K_s^c1 "
                    "(contradicts guaranteed detection; c1 mis-tuned)")
            dropped += 1
            continue
        if abs(cp.s) >= _S_EDGE:
            raise RuntimeError(f"|s_k| >= pi/3 at k={k}: outside the stationary window")
        pk = packet_u_k(eps, sym, src, cp)
        values.append(pk.value)
        if keep_packets:
            packets.append(pk)
    total_u = compensated_sum(np.array(values, dtype=complex)) if values else 0.0 + 0.0j
    U = np.exp(-1j * T / eps**2) * total_u / eps
    return PacketSum(U=complex(U), packets=packets, n_live=len(values),
                     n_dropped_transition=dropped)


# ----------------------------------------------------------------------------
# Exact-y-integrated 2-D form of a single w_k (validation oracle)
# ----------------------------------------------------------------------------

def wk_exact_2d(eps: float, sym: DispersionSymbol, src: SourceSpec, k: int,
                t: float, x: float, refine: int = 0,
                diag_cut: Optional[float] = None,
                rho_rel: float = 1e-8) -> complex:
    """w_k by 2-D quadrature after the exact y-integration (rho_hat).

    w_k = int int e^{-i[(k pi + s - t) p(k pi + xi) ... ]/eps}
          zeta(k pi + xi) theta(eps(k pi + s)) pi_1(k pi + s)
          rho_hat((s - xi)/eps) chi_cut(s - xi) chi_{2pi/3}(s) ds dxi.

    diag_cut sets the diagonal truncation scale (chi_cut = chi((s-xi)/diag_cut));
    by default the integral runs over the full spectral window of rho (the
    form every cross-method comparison targets: the fixed 1/4-truncation of
    the analysis would cut O(1) fractions of the rho_hat mass at desk-scale
    eps). Valid for every k, including the dispersive regime where the 3-D
    brute force is out of reach.
    """
    from .oscquad import gl_nodes
    from .smooth import CutoffSpec

    gamma = src.gamma
    prof = src.profile
    rho_hat = src.rho_hat()
    cut = CutoffSpec()
    sgn = 1.0 if k % 2 == 0 else -1.0
    s_lo, s_hi = -2.0 * math.pi / 3.0, 2.0 * math.pi / 3.0
    W = rho_hat.effective_width(rel=rho_rel)
    dxi = eps * W if diag_cut is None else min(diag_cut, eps * W)

    # panel counts from phase-rate bounds
    rate_s = (1.0 + gamma + 1.0) / eps
    n_s = int(math.ceil((s_hi - s_lo) * rate_s / (2.0 * math.pi))) * 2 ** refine
    xi_peak = k * math.pi + s_hi + dxi
    xi_grid = np.linspace(max(k * math.pi - s_hi - dxi, 1e-3), xi_peak, 256)
    dp_max = float(np.max(sym.dp(xi_grid)))
    rate_xi = (abs(k * math.pi + s_hi - t) * dp_max + abs(x) + src.profile.r) / eps
    n_xi = max(4, int(math.ceil(2.0 * dxi * rate_xi / (2.0 * math.pi)))) * 2 ** refine
    if 12 * n_xi > 40_000_000:
        raise MemoryError(f"wk_exact_2d would need {12 * n_xi} xi nodes; "
                          "loosen rho_rel or shrink the window")

    xg, wg = gl_nodes(12)
    se = np.linspace(s_lo, s_hi, n_s + 1)
    sh = 0.5 * np.diff(se)
    sm = se[:-1] + sh
    s_nodes = (sm[:, None] + sh[:, None] * xg[None, :]).ravel()
    s_w = (np.repeat(sh, 12) * np.tile(wg, n_s))

    chi_s = cut.chi(s_nodes / (2.0 * math.pi / 3.0))
    amp_s = (prof.theta(eps * (k * math.pi + s_nodes))
             * prof.pi_m(1, k * math.pi + s_nodes) * chi_s)
    live = amp_s != 0.0
    if not live.any():
        return 0.0 + 0.0j
    xe = np.linspace(-dxi, dxi, n_xi + 1)
    xh = 0.5 * np.diff(xe)
    xm = xe[:-1] + xh
    u_nodes = (xm[:, None] + xh[:, None] * xg[None, :]).ravel()   # xi - s offsets
    u_w = (np.repeat(xh, 12) * np.tile(wg, n_xi))
    diag_amp = rho_hat(u_nodes / eps)
    if diag_cut is not None:
        diag_amp = diag_amp * cut.chi(u_nodes / diag_cut)

    sl = s_nodes[live]
    out = np.zeros(sl.shape, dtype=complex)
    step = max(4, int(3_000_000 // max(u_nodes.size, 1)))
    for j0 in range(0, sl.size, step):
        sb = sl[j0:j0 + step][:, None]
        xi = k * math.pi + sb + u_nodes[None, :]
        phase = ((k * math.pi - t) * sym.p(xi) + sb * (sym.p(xi) - 1.0)
                 + x * (sb + u_nodes[None, :]) - sgn * gamma * np.cos(sb)) / eps
        amp = src.zeta.zeta(1, xi) * diag_amp[None, :]
        out[j0:j0 + step] = ((amp * np.exp(-1j * phase)) * u_w[None, :]).sum(axis=1)
    return complex(np.sum(out * amp_s[live] * s_w[live]))


def packet_prefactor(eps: float, gamma: float, k: int, x: float) -> complex:
    """sqrt(eps)/(2 pi) * e^{i(-gamma + k pi - k pi x)/eps}: u_k = prefactor * w_k."""
    return math.sqrt(eps) / (2.0 * math.pi) * np.exp(
        1j * (-gamma + k * math.pi - k * math.pi * x) / eps)
