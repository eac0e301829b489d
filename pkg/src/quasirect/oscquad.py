"""Highly-oscillatory quadrature shared by every other module.

Four entry points:

* ``integrate_osc_1d``        -- composite Gauss-Legendre for int a(s) e^{i phi(s)/h} ds,
  panels sized from the phase variation (>= N_PP nodes per 2 pi), refined
  until two levels agree;
* ``stationary_phase_leading`` -- the leading-order stationary phase value
  h^{n/2} (2 pi)^{n/2} |det|^{-1/2} e^{-i pi/4 sign} a(x0) e^{-i phi(x0)/h};
* ``integrate_osc_3d_bruteforce`` -- tensor-product Gauss oracle with a
  two-level Richardson error estimate;
* ``integrate_singular_profile``  -- int_0^inf e^{-i (ell/6)(1/s - T/s^2)} g(s) ds
  with a graded mesh toward s = 0 and the v = 1/s substitution below a
  splitting point.

Panel sums are accumulated in fixed panel order with Neumaier compensation,
so results are bit-reproducible regardless of worker count.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.special import spherical_jn

N_PP = 12          # Gauss-Legendre nodes per 2*pi of phase change
MAX_REFINE = 14


@lru_cache(maxsize=32)
def gl_nodes(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def compensated_sum(values: np.ndarray) -> complex:
    """Exactly-rounded summation (math.fsum) in fixed index order."""
    import math
    v = np.asarray(values)
    return complex(math.fsum(v.real.tolist()), math.fsum(v.imag.tolist()))


@dataclass(frozen=True)
class Oscillatory1D:
    """int_{lo}^{hi} amplitude(s) * exp(i * phase(s)/h) ds."""
    amplitude: Callable
    phase: Callable
    h: float = 1.0
    lo: float = 0.0
    hi: float = 1.0
    dphase: Optional[Callable] = None

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("h must be positive")


@dataclass
class QuadResult:
    value: complex
    error: float
    converged: bool
    panels: int


def _panel_edges(f: Oscillatory1D, n_probe: int = 2049) -> np.ndarray:
    """Panel boundaries giving <= 2*pi*h of phase variation per panel."""
    s = np.linspace(f.lo, f.hi, n_probe)
    if f.dphase is not None:
        rate = np.abs(f.dphase(s))
        var = np.concatenate(([0.0], np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(s))))
    else:
        ph = np.asarray(f.phase(s), dtype=float)
        var = np.concatenate(([0.0], np.cumsum(np.abs(np.diff(ph)))))
    total = var[-1] / f.h
    n_panels = max(4, int(np.ceil(total / (2.0 * np.pi))))
    n_panels = min(n_panels, 4_000_000)
    targets = np.linspace(0.0, var[-1], n_panels + 1)
    edges = np.interp(targets, var, s)
    edges[0], edges[-1] = f.lo, f.hi
    return np.unique(edges)


def _gl_eval(f: Oscillatory1D, edges: np.ndarray, deg: int) -> complex:
    x, w = gl_nodes(deg)
    a = edges[:-1]
    half = 0.5 * np.diff(edges)
    mid = a + half
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f.amplitude(nodes)) * np.exp(1j * np.asarray(f.phase(nodes)) / f.h)
    panel = (vals * w[None, :]).sum(axis=1) * half
    return compensated_sum(panel)


def integrate_osc_1d(f: Oscillatory1D, tol: float = 1e-10,
                     full_output: bool = False):
    """Adaptive composite Gauss-Legendre for a 1-D oscillatory integral.

    Panels carry >= N_PP nodes per 2*pi of phase change; the partition is
    refined (doubled) until two consecutive levels agree within tol
    (absolute + relative). On budget exhaustion the best value is returned
    with converged=False.
    """
    edges = _panel_edges(f)
    prev = _gl_eval(f, edges, N_PP)
    for level in range(MAX_REFINE):
        fine_edges = np.unique(np.concatenate([edges, 0.5 * (edges[:-1] + edges[1:])]))
        cur = _gl_eval(f, fine_edges, N_PP)
        err = abs(cur - prev)
        if err <= tol * (1.0 + abs(cur)):
            res = QuadResult(cur, err, True, len(fine_edges) - 1)
            return (res.value, res) if full_output else res.value
        edges, prev = fine_edges, cur
    res = QuadResult(prev, err, False, len(edges) - 1)
    return (res.value, res) if full_output else res.value


# ----------------------------------------------------------------------------
# Batched composite Gauss-Legendre (same panel rule, vectorized over a family)
# ----------------------------------------------------------------------------

def gl_batched(amplitude, phase, lo, hi, rate_bound, h: float = 1.0,
               deg: int = N_PP, refine: int = 0):
    """Vectorized fixed-rule twin of integrate_osc_1d for integrand families.

    ``lo``, ``hi`` and ``rate_bound`` (a bound on |phase'|) are arrays over the
    family; ``amplitude(s)``/``phase(s)`` receive a (family, nodes) array. All
    members share a panel count derived from the worst phase variation, so the
    evaluation is a single rectangular array operation. ``refine`` doubles the
    panel count (for two-level error checks).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    rate = np.asarray(rate_bound, dtype=float)
    length = np.maximum(hi - lo, 0.0)
    var = rate * length / h
    n_panels = max(2, int(np.ceil(np.max(var) / (2.0 * np.pi)))) * (1 << refine)
    x, w = gl_nodes(deg)
    k = np.arange(n_panels)
    # panel grid per member: lo + length * (k + (x+1)/2)/n_panels
    offs = (k[:, None] + 0.5 * (x[None, :] + 1.0)) / n_panels
    nodes = lo[:, None, None] + length[:, None, None] * offs[None, :, :]
    vals = amplitude(nodes) * np.exp(1j * phase(nodes) / h)
    half = (length / (2.0 * n_panels))
    panel = (vals * w[None, None, :]).sum(axis=2)  # (family, panels)
    return panel.sum(axis=1) * half


# ----------------------------------------------------------------------------
# Stationary phase
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class StationaryData:
    """Non-degenerate stationary point data for int a e^{-i phi/h} dx."""
    point: np.ndarray
    phase_value: float
    gradient: np.ndarray
    hessian: np.ndarray
    amplitude: complex
    h: float
    grad_tol: float = 1e-8


def stationary_phase_leading(d: StationaryData) -> complex:
    """Leading-order stationary phase value at a non-degenerate point.

    Returns h^{n/2} (2 pi)^{n/2} |det H|^{-1/2} e^{-i (pi/4) sign(H)}
            * a(x0) * e^{-i phi(x0)/h}.
    """
    H = np.atleast_2d(np.asarray(d.hessian, dtype=float))
    n = H.shape[0]
    if np.linalg.norm(np.atleast_1d(d.gradient)) > d.grad_tol:
        raise ValueError("gradient does not vanish at the declared point")
    det = np.linalg.det(H)
    if abs(det) < 1e-14:
        raise ValueError("singular Hessian rejected")
    sig = int(np.sum(np.sign(np.linalg.eigvalsh(H))))
    amp = (d.h * 2.0 * np.pi) ** (n / 2.0) / np.sqrt(abs(det))
    return amp * np.exp(-1j * np.pi / 4.0 * sig) * d.amplitude * np.exp(-1j * d.phase_value / d.h)


def integrate_osc_3d_bruteforce(amp: Callable, phase: Callable,
                                box: Sequence[Tuple[float, float]], h: float,
                                nodes_per_dim: int, tol: float = 1e-6,
                                richardson: bool = True):
    """Tensor-product Gauss value of int a e^{-i phi/h} over a 3-D box.

    ``phase`` and ``amp`` receive meshgrid arrays (s, y, xi). With
    richardson=True a second pass at ~2/3 resolution provides the error
    estimate; a ``resolution-insufficient`` flag is set when the two levels
    disagree beyond tol.
    """

    def tensor_value(n: int) -> complex:
        vals = []
        x, w = gl_nodes(n)
        axes = []
        for (lo, hi) in box:
            halfw = 0.5 * (hi - lo)
            axes.append((lo + halfw * (x + 1.0), w * halfw))
        t0, w0 = axes[0]
        t1, w1 = axes[1]
        t2, w2 = axes[2]
        total = 0.0 + 0.0j
        # chunk the first axis to bound memory
        for i0 in range(len(t0)):
            S = t0[i0]
            Y, XI = np.meshgrid(t1, t2, indexing="ij")
            Sg = np.full_like(Y, S)
            f = amp(Sg, Y, XI) * np.exp(-1j * phase(Sg, Y, XI) / h)
            total += w0[i0] * ((f * w1[:, None] * w2[None, :]).sum())
        return total

    v_fine = tensor_value(nodes_per_dim)
    if not richardson:
        return QuadResult(v_fine, np.nan, True, nodes_per_dim**3)
    n_coarse = max(4, (2 * nodes_per_dim) // 3)
    v_coarse = tensor_value(n_coarse)
    err = abs(v_fine - v_coarse)
    ok = err <= tol * (1.0 + abs(v_fine))
    return QuadResult(v_fine, err, ok, nodes_per_dim**3)


# ----------------------------------------------------------------------------
# The singular interference-profile integral
# ----------------------------------------------------------------------------

def integrate_singular_profile(g: Callable, T: float, ell: float,
                               tol: float = 1e-8,
                               support: Tuple[float, float] = (0.0, 1.0)):
    """int_0^inf e^{-i (ell/6)(1/s - T/s^2)} g(s) ds for compactly supported g.

    Above a splitting point delta the integral runs through the composite
    oscillatory rule with analytic phase derivative; on (s_lo, delta] the
    substitution v = 1/s turns the phase into the polynomial
    -(ell/6)(v - T v^2) and the graded endpoint behavior disappears.
    ell <= 0 is required (ell = 0 collapses to plain quadrature).
    """
    if ell > 0:
        raise ValueError("profile integral defined for ell <= 0")
    s_lo, s_hi = support
    if s_hi <= max(s_lo, 0.0):
        return 0.0 + 0.0j
    s_lo = max(s_lo, 0.0)

    if ell == 0.0:
        f = Oscillatory1D(lambda s: np.asarray(g(s), dtype=complex),
                          lambda s: np.zeros_like(np.asarray(s, dtype=float)),
                          1.0, s_lo, s_hi, dphase=lambda s: np.zeros_like(np.asarray(s)))
        return integrate_osc_1d(f, tol=tol)

    c = ell / 6.0
    delta = min(max(0.25 * np.sqrt(abs(c) * max(T, 1.0) / np.pi), 4.0 * s_lo, 1e-3), s_hi)

    total = 0.0 + 0.0j
    if delta < s_hi:
        f_out = Oscillatory1D(
            lambda s: np.asarray(g(s), dtype=complex),
            lambda s: -c * (1.0 / s - T / s**2),
            1.0, delta, s_hi,
            dphase=lambda s: -c * (-1.0 / s**2 + 2.0 * T / s**3))
        total += integrate_osc_1d(f_out, tol=tol)
    if s_lo < delta:
        v_lo, v_hi = 1.0 / delta, np.inf
        if s_lo > 0.0:
            v_hi = 1.0 / s_lo
        else:
            # g vanishes near 0 by compact support; find an effective edge
            probe = np.geomspace(delta, delta * 1e-12, 200)
            nz = np.abs(np.asarray(g(probe), dtype=complex)) > 0
            v_hi = 1.0 / (probe[nz].min() / 2.0) if nz.any() else 1.0 / (0.5 * delta)
        f_in = Oscillatory1D(
            lambda v: np.asarray(g(1.0 / v), dtype=complex) / v**2,
            lambda v: -c * (v - T * v**2),
            1.0, v_lo, v_hi,
            dphase=lambda v: -c * (1.0 - 2.0 * T * v))
        total += integrate_osc_1d(f_in, tol=tol)
    return total


# ----------------------------------------------------------------------------
# Filon rule for exactly-linear phases (Duhamel integrals)
# ----------------------------------------------------------------------------

def filon_linear_phase(samples: np.ndarray, a: float, b: float,
                       omega: np.ndarray, deg: int = 16) -> np.ndarray:
    """int_a^b F(s, j) e^{i omega_j s} ds with F smooth, phase exactly linear.

    ``samples`` has shape (n_panels, deg, n_family): F evaluated on the
    Gauss-Legendre nodes of each panel (uniform panels over [a, b]). Per panel
    the amplitude is projected on Legendre polynomials and integrated against
    the exact moments  int_-1^1 P_n(u) e^{i kappa u} du = 2 i^n j_n(kappa).
    Returns the complex integral per family member.
    """
    n_panels, ndeg, n_fam = samples.shape
    assert ndeg == deg
    x, w = gl_nodes(deg)
    # Legendre projection: c_n = (2n+1)/2 * sum_i w_i P_n(x_i) F(x_i)
    P = np.polynomial.legendre.legvander(x, deg - 1)          # (deg, deg)
    proj = (np.arange(deg) + 0.5)[:, None] * (P * w[:, None]).T  # (deg_n, deg_i)
    coeffs = np.einsum("ni,pif->pnf", proj, samples)

    h_half = 0.5 * (b - a) / n_panels
    mids = a + (2.0 * np.arange(n_panels) + 1.0) * h_half
    kappa = np.asarray(omega, dtype=float) * h_half          # (n_fam,)
    n_ord = np.arange(deg)
    jn = spherical_jn(n_ord[:, None], np.abs(kappa)[None, :])  # (deg, n_fam)
    # j_n(-x) = (-1)^n j_n(x)
    sign = np.where(kappa[None, :] < 0, (-1.0) ** n_ord[:, None], 1.0)
    moments = 2.0 * (1j ** n_ord)[:, None] * jn * sign        # (deg, n_fam)

    phase_mid = np.exp(1j * np.asarray(omega)[None, :] * mids[:, None])  # (panels, fam)
    per_panel = np.einsum("pnf,nf->pf", coeffs, moments) * h_half
    out = (per_panel * phase_mid).sum(axis=0)
    return out
