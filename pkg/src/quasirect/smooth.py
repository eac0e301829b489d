"""Smooth cutoffs, bumps and ramps used throughout the package.

Everything here is built from the C-infinity seed f(u) = exp(-1/u) (u > 0),
so all transitions are genuinely smooth: spectral quadratures and Riemann-sum
limits in the rest of the package rely on that. The step and the cutoff also
expose analytic first and second derivatives, which the whistler symbol needs
for its curvature audit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# exp(-1/u) underflows to 0.0 below ~1/745; treat the tails as exactly flat
_U_FLOOR = 1.0 / 700.0


def _f(u):
    """exp(-1/u) for u > 0, hard zero otherwise."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > _U_FLOOR
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def _df(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > _U_FLOOR
    up = u[pos]
    out[pos] = np.exp(-1.0 / up) / up**2
    return out


def _d2f(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > _U_FLOOR
    up = u[pos]
    out[pos] = np.exp(-1.0 / up) * (1.0 / up**4 - 2.0 / up**3)
    return out


def step_down(u, derivatives: bool = False):
    """Smooth decreasing step S with S=1 for u<=0 and S=0 for u>=1.

    S(u) = f(1-u) / (f(u) + f(1-u)); strictly decreasing on (0, 1).
    With derivatives=True returns (S, S', S'').
    """
    u = np.asarray(u, dtype=float)
    a = _f(u)
    b = _f(1.0 - u)
    den = a + b
    inner = den > 0.0
    s = np.where(u <= 0.0, 1.0, 0.0)
    s = np.where(inner, np.divide(b, den, out=np.ones_like(den), where=inner), s)
    if not derivatives:
        return s

    da = _df(u)
    db = -_df(1.0 - u)
    d2a = _d2f(u)
    d2b = _d2f(1.0 - u)
    num = db * a - da * b          # numerator of S' * den^2
    dnum = d2b * a - d2a * b       # cross terms cancel exactly
    ds = np.zeros_like(s)
    d2s = np.zeros_like(s)
    den2 = np.where(inner, den, 1.0)
    ds = np.where(inner, num / den2**2, 0.0)
    d2s = np.where(inner, dnum / den2**2 - 2.0 * num * (da + db) / den2**3, 0.0)
    return s, ds, d2s


def ramp_up(u):
    """Smooth increasing ramp: 0 for u<=0, 1 for u>=1."""
    return 1.0 - step_down(u)


@dataclass(frozen=True)
class CutoffSpec:
    """Even smooth cutoff chi: 1 on |s|<inner, 0 on |s|>outer, strictly
    decreasing in between. Defaults are the canonical (5/8, 1) transition."""

    inner: float = 0.625
    outer: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.inner < self.outer):
            raise ValueError(f"cutoff needs 0 < inner < outer, got {(self.inner, self.outer)}")

    @property
    def width(self) -> float:
        return self.outer - self.inner

    def chi(self, s):
        u = (np.abs(np.asarray(s, dtype=float)) - self.inner) / self.width
        return step_down(u)

    def chi_d1(self, s):
        s = np.asarray(s, dtype=float)
        u = (np.abs(s) - self.inner) / self.width
        _, ds, _ = step_down(u, derivatives=True)
        return np.sign(s) * ds / self.width

    def chi_d2(self, s):
        s = np.asarray(s, dtype=float)
        u = (np.abs(s) - self.inner) / self.width
        _, _, d2s = step_down(u, derivatives=True)
        return d2s / self.width**2

    def scaled(self, t0: float):
        """chi_{t0}(s) := chi(s/t0), as a plain callable."""
        return lambda s: self.chi(np.asarray(s, dtype=float) / t0)


def bump(x, lo: float, hi: float):
    """C-infinity bump supported on [lo, hi], normalized to max 1 at midpoint."""
    x = np.asarray(x, dtype=float)
    u = (x - lo) / (hi - lo)
    return np.exp(4.0) * _f(u) * _f(1.0 - u)


def plateau(x, lo: float, hi: float, edge: float):
    """Smooth window: 0 outside (lo, hi), 1 on [lo+edge, hi-edge]."""
    x = np.asarray(x, dtype=float)
    return ramp_up((x - lo) / edge) * ramp_up((hi - x) / edge)
