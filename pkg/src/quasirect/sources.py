"""Oscillating source data: phase, profile family, multipliers, resonance amplitude.

The phase is phi(t, x) = t - x t + gamma (cos t - 1) with gamma in (0, 1/4).
Profiles are separable products a_m(T, t, x) = theta(T) pi_m(t) rho(x):

* theta  -- plateau bump supported on [T_lo, T_cap]  (long-time factor);
* pi_m   -- smooth ramp from t = 1, exactly periodic past t_s (fast time);
* rho    -- bump on [-r, r] (space), with a precomputed spectral table
            rho_hat since the linear solver consumes it at ~1e7 points.

a_1 agrees exactly with the periodized shape abar for t >= t_s by
construction (the ramp saturates at 1 there).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .smooth import CutoffSpec, bump, plateau, ramp_up


@dataclass(frozen=True)
class PhaseParams:
    gamma: float = 0.2

    def __post_init__(self):
        if not (0.0 < self.gamma < 0.25):
            raise ValueError(f"gamma must lie in (0, 1/4), got {self.gamma}")


def phase_eval(gamma: float, t, x):
    """phi(t, x) = t - x t + gamma (cos t - 1)."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    return t - x * t + gamma * (np.cos(t) - 1.0)


def phase_grad(gamma: float, t, x):
    """(d_t phi, d_x phi) = (1 - x - gamma sin t, -t)."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    return 1.0 - x - gamma * np.sin(t), -t + 0.0 * x


def A_eps_sq(gamma: float, eps: float) -> complex:
    """A_eps^2 = sqrt(2/(pi gamma)) e^{-i gamma/eps} cos(gamma/eps - pi/4)."""
    if not (0.0 < gamma < 0.25):
        raise ValueError("gamma out of range (0, 1/4)")
    if eps <= 0:
        raise ValueError("eps must be positive")
    arg = gamma / eps
    return math.sqrt(2.0 / (math.pi * gamma)) * np.exp(-1j * arg) * math.cos(arg - math.pi / 4.0)


def A_eps(gamma: float, eps: float) -> complex:
    """Principal square root of A_eps^2 (the tan law only sees A_eps^2)."""
    return complex(np.sqrt(complex(A_eps_sq(gamma, eps))))


# ----------------------------------------------------------------------------
# Profiles
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ProfileSpec:
    """Separable profile family a_m = theta(T) pi_m(t) rho(x).

    period may be pi or 2*pi; the fast-time accent factor is
    1 + accent*cos(2 pi t/period), so the pi-periodic default activates the
    reduced (single-branch) interference law. T_lo > 0 keeps every emitted
    packet in the almost-stationary regime (see notes in the linear solver).
    """
    r: float = 0.09
    T_cap: float = 1.0
    t_s: float = 4.0 * math.pi
    period: float = math.pi
    T_lo: float = 0.5
    accent: float = 0.1
    theta_edge: float = 0.15
    gamma: float = 0.2   # for the r < gamma/2 validation
    rho_shape: str = "plateau"   # plateau | bump
    rho_edge: float = 0.35       # taper fraction of r (plateau shape)

    def __post_init__(self):
        if not (0.0 < self.r < self.gamma / 2.0):
            raise ValueError(f"need 0 < r < gamma/2, got r={self.r}, gamma={self.gamma}")
        if self.T_cap <= 0 or self.t_s <= 0:
            raise ValueError("T_cap and t_s must be positive")
        if self.period not in (math.pi, 2.0 * math.pi):
            raise ValueError("period must be pi or 2*pi")
        if not (0.0 <= self.T_lo < self.T_cap):
            raise ValueError("need 0 <= T_lo < T_cap")
        if 2.0 * self.theta_edge >= self.T_cap - self.T_lo:
            raise ValueError("theta_edge too wide for the [T_lo, T_cap] window")
        if self.rho_shape not in ("plateau", "bump"):
            raise ValueError(f"unknown rho_shape {self.rho_shape!r}")
        if not (0.05 < self.rho_edge < 0.95):
            raise ValueError("rho_edge must be a fraction of r in (0.05, 0.95)")

    # -- separable factors ----------------------------------------------------
    def theta(self, T):
        return plateau(T, self.T_lo, self.T_cap, self.theta_edge)

    def ramp(self, t):
        return ramp_up((np.asarray(t, dtype=float) - 1.0) / (self.t_s - 1.0))

    def accent_factor(self, t):
        t = np.mod(np.asarray(t, dtype=float), self.period)
        return 1.0 + self.accent * np.cos(2.0 * np.pi * t / self.period)

    def pi_m(self, m: int, t):
        return self.ramp(t) * self.accent_factor(t)

    def rho(self, x):
        """Spatial factor: flat-top window by default (value 1 on the core,
        so lattice points z with |eps z| inside the core carry full weight)."""
        if self.rho_shape == "bump":
            return bump(x, -self.r, self.r)
        return plateau(x, -self.r, self.r, self.rho_edge * self.r)


def profile_eval(spec: ProfileSpec, m: int, T, t, x):
    """a_m(T, t, x); supported in (-inf, T_cap] x [1, inf) x [-r, r]."""
    return spec.theta(T) * spec.pi_m(m, t) * spec.rho(x)


def abar_eval(spec: ProfileSpec, T, t, x):
    """Periodized shape abar: a_1 without the start-up ramp."""
    return spec.theta(T) * spec.accent_factor(t) * spec.rho(x)


class RhoHat:
    """Spectral table of rho: rho_hat(eta) = int e^{-i x eta} rho(x) dx.

    rho is real and even, so rho_hat is real and even; the table is built
    once by FFT of the padded profile and queried through a cubic spline.
    support gives the |eta| beyond which the table treats rho_hat as zero.
    """

    def __init__(self, spec: ProfileSpec, eta_max: float = 24000.0,
                 pad_factor: int = 256, floor: float = 1e-16):
        r = spec.r
        X = pad_factor * r
        n = 1 << int(math.ceil(math.log2(2.0 * X * eta_max / math.pi * 1.1)))
        dx = 2.0 * X / n
        x = -X + dx * np.arange(n)
        rho = spec.rho(x)
        # rectangle rule is spectrally accurate for a smooth compact profile
        vals = np.fft.fft(np.fft.ifftshift(rho)) * dx
        eta = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
        keep = (eta >= 0.0) & (eta <= eta_max)
        order = np.argsort(eta[keep])
        self.eta_grid = eta[keep][order]
        self.table = np.real(vals[keep][order])
        self.peak = float(self.table[0])
        live = np.abs(self.table) > floor * abs(self.peak)
        self.support = float(self.eta_grid[live][-1]) if live.any() else 0.0
        self._spline = CubicSpline(self.eta_grid, self.table, extrapolate=False)

    def __call__(self, eta):
        eta = np.abs(np.asarray(eta, dtype=float))
        out = self._spline(np.minimum(eta, self.eta_grid[-1]))
        out = np.where(eta > self.support, 0.0, out)
        return np.nan_to_num(out, nan=0.0)

    def effective_width(self, rel: float = 1e-8) -> float:
        """Smallest W with |rho_hat| < rel * peak beyond W."""
        live = np.abs(self.table) > rel * abs(self.peak)
        return float(self.eta_grid[live][-1]) if live.any() else 0.0


@dataclass(frozen=True)
class ZetaSpec:
    """Multipliers zeta_m: identically 1 for m != 0; for m = 0 a smooth
    high-pass vanishing on [-xi0, xi0] and equal to 1 beyond 1.6*xi0."""
    xi0: float = 1.0
    cutoff: CutoffSpec = field(default_factory=CutoffSpec)

    def zeta(self, m: int, xi):
        xi = np.asarray(xi, dtype=float)
        if m != 0:
            return np.ones_like(xi)
        return 1.0 - self.cutoff.chi(0.625 * xi / self.xi0)


@dataclass(frozen=True)
class SourceSpec:
    """Full description of F_L: phase gamma, profile family, multipliers."""
    phase: PhaseParams = field(default_factory=PhaseParams)
    profile: ProfileSpec = field(default_factory=ProfileSpec)
    zeta: ZetaSpec = field(default_factory=ZetaSpec)
    harmonics: tuple = (-2, -1, 1, 2)

    def __post_init__(self):
        if 0 in self.harmonics and self.zeta.xi0 <= 0:
            raise ValueError("harmonic 0 requires a positive vanishing radius xi0")

    @property
    def gamma(self) -> float:
        return self.phase.gamma

    def a_m(self, m: int, T, t, x):
        return profile_eval(self.profile, m, T, t, x)

    def abar(self, T, t, x):
        return abar_eval(self.profile, T, t, x)

    def rho_hat(self) -> RhoHat:
        return _rho_hat_cached(self.profile)


_RHO_CACHE: dict = {}


def _rho_hat_cached(profile: ProfileSpec) -> RhoHat:
    key = (profile.r, profile.rho_shape, profile.rho_edge)
    if key not in _RHO_CACHE:
        _RHO_CACHE[key] = RhoHat(profile)
    return _RHO_CACHE[key]


def default_source(gamma: float = 0.2, **profile_kwargs) -> SourceSpec:
    prof = ProfileSpec(gamma=gamma, **profile_kwargs)
    return SourceSpec(phase=PhaseParams(gamma=gamma), profile=prof)
