"""Declarative experiment configuration: TOML files, overrides, validation, hashing.

A config is a plain nested dict with the defaults below; `--set a.b.c=value`
overrides go through the same validation. The manifest hash covers the
resolved physics configuration (not output paths or thread counts), so two
runs of the same experiment are identifiable regardless of where they wrote.
"""

from __future__ import annotations

import ast
import copy
import hashlib
import json
import math
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .sources import PhaseParams, ProfileSpec, SourceSpec, ZetaSpec
from .symbols import DispersionSymbol, make_symbol


DEFAULTS: Dict[str, Any] = {
    "symbol": {"kind": "model", "D": 4, "chi_inner": 0.625, "chi_outer": 1.0},
    "phase": {"gamma": 0.2},
    "profile": {"r": 0.09, "T_cap": 1.0, "t_s": 4.0 * math.pi, "period": "pi",
                "T_lo": 0.5, "accent": 0.1, "theta_edge": 0.15,
                "rho_shape": "plateau", "rho_edge": 0.35,
                "harmonics": [-2, -1, 1, 2]},
    "source": {"xi0": 1.0},
    "quad": {"tol": 1e-9, "n_pp": 12, "tol_scale": 1.0},
    "grid": {"L": 0.0, "N": 0, "xi_max": 0.0},     # 0 = auto
    "ladder": {"eps": [1 / 50, 1 / 100, 1 / 200, 1 / 400], "cos_floor": 0.3},
    "toy": {"eps": 1 / 50, "n": 1, "lam": 1.0, "j1": 2, "j2": 0, "nu": 0.0,
            "omega": -1.0, "T_end": 1.0, "blowup_warn": 1.3, "blowup_hard": 1.45},
    "nonlinearity": {"lam": 1.0, "j1": 2, "j2": 0, "nu": 0.0, "omega": -1.0,
                     "iota": 0.6, "beta": 0.0},    # beta 0 = auto midpoint
    "run": {"T_list": [1.25, 1.5], "z_list": [0.0, 1.0, 2.0, -2.0, 0.5],
            "out": "out"},
}


class ConfigError(ValueError):
    pass


def _deep_merge(base: Dict, extra: Dict, path: str = "") -> Dict:
    out = copy.deepcopy(base)
    for key, val in extra.items():
        here = f"{path}.{key}" if path else key
        if key not in out:
            raise ConfigError(f"unknown config key: {here}")
        if isinstance(out[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"{here}: expected a table")
            out[key] = _deep_merge(out[key], val, here)
        else:
            out[key] = val
    return out


def load_config(path: Optional[str] = None, overrides: Optional[List[str]] = None,
                tol_scale: float = 1.0) -> Dict[str, Any]:
    cfg = copy.deepcopy(DEFAULTS)
    if path:
        with open(path, "rb") as fh:
            cfg = _deep_merge(cfg, tomllib.load(fh))
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"--set needs path=value, got {item!r}")
        key, _, raw = item.partition("=")
        parts = key.strip().split(".")
        try:
            value = ast.literal_eval(raw.strip())
        except (ValueError, SyntaxError):
            value = raw.strip()
        node: Dict[str, Any] = cfg
        for p in parts[:-1]:
            if p not in node or not isinstance(node[p], dict):
                raise ConfigError(f"unknown config table: {'.'.join(parts[:-1])}")
            node = node[p]
        if parts[-1] not in node:
            raise ConfigError(f"unknown config key: {key.strip()}")
        node[parts[-1]] = value
    if tol_scale != 1.0:
        cfg["quad"]["tol_scale"] = float(tol_scale)
    validate(cfg)
    return cfg


def validate(cfg: Dict[str, Any]) -> None:
    """Range checks; failures name the offending field path."""
    def err(path, msg):
        raise ConfigError(f"{path}: {msg}")

    g = cfg["phase"]["gamma"]
    if not (0.0 < g < 0.25):
        err("phase.gamma", f"must lie in (0, 1/4), got {g}")
    r = cfg["profile"]["r"]
    if not (0.0 < r < g / 2.0):
        err("profile.r", f"must lie in (0, gamma/2) = (0, {g/2}), got {r}")
    if cfg["profile"]["period"] not in ("pi", "2pi"):
        err("profile.period", "must be 'pi' or '2pi'")
    if cfg["symbol"]["kind"] not in ("model", "whistler", "constant"):
        err("symbol.kind", f"unknown kind {cfg['symbol']['kind']!r}")
    nl = cfg["nonlinearity"]
    if nl["nu"] + nl["j1"] + nl["j2"] < 2:
        err("nonlinearity", "nu + j1 + j2 must be >= 2")
    if not (0.0 <= nl["iota"] <= 1.0):
        err("nonlinearity.iota", f"must lie in [0, 1], got {nl['iota']}")
    if nl["beta"]:
        from .nonlinear import beta_window
        lo, hi = beta_window(2.0, nl["iota"])
        if not (lo < nl["beta"] < hi):
            err("nonlinearity.beta", f"outside the admissible window ({lo:.4f}, {hi:.4f})")
    for e in cfg["ladder"]["eps"]:
        if not (0.0 < e <= 1.0):
            err("ladder.eps", f"entries must lie in (0, 1], got {e}")
    if cfg["quad"]["n_pp"] < 4:
        err("quad.n_pp", "needs at least 4 nodes per period")


def config_hash(cfg: Dict[str, Any]) -> str:
    """sha256 of the physics configuration (output path excluded)."""
    scrubbed = copy.deepcopy(cfg)
    scrubbed["run"].pop("out", None)
    blob = json.dumps(scrubbed, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class Experiment:
    """Resolved physics objects for one configuration."""
    cfg: Dict[str, Any]
    sym: DispersionSymbol
    src: SourceSpec

    @property
    def gamma(self) -> float:
        return self.cfg["phase"]["gamma"]

    @property
    def tol(self) -> float:
        return self.cfg["quad"]["tol"] * self.cfg["quad"]["tol_scale"]

    def grid_for(self, eps: float, max_harmonic: int = 1):
        """FourierGrid from config (0 entries mean auto-sizing)."""
        from .linear_solver import default_grid
        g = self.cfg["grid"]
        return default_grid(eps, self.src,
                            L=g["L"] or None, N=g["N"] or None,
                            xi_max=g["xi_max"] or None,
                            max_harmonic=max_harmonic)

    def field(self, eps: float, harmonics=(1,)):
        """LinearField honoring the grid/quad configuration."""
        from .linear_solver import LinearField
        return LinearField(eps, self.sym, self.src,
                           grid=self.grid_for(eps, max(abs(h) for h in harmonics)),
                           harmonics=list(harmonics), tol=self.tol,
                           n_pp=self.cfg["quad"]["n_pp"])

    def ladder(self) -> List[float]:
        """Default ladder filtered to |cos(gamma/eps - pi/4)| >= cos_floor."""
        floor = self.cfg["ladder"]["cos_floor"]
        out = [e for e in self.cfg["ladder"]["eps"]
               if abs(math.cos(self.gamma / e - math.pi / 4.0)) >= floor]
        return out

    def hash(self) -> str:
        return config_hash(self.cfg)


def build_experiment(cfg: Dict[str, Any]) -> Experiment:
    sy = cfg["symbol"]
    sym = make_symbol(sy["kind"], D=sy["D"], chi_inner=sy["chi_inner"],
                      chi_outer=sy["chi_outer"])
    period = math.pi if cfg["profile"]["period"] == "pi" else 2.0 * math.pi
    prof = ProfileSpec(r=cfg["profile"]["r"], T_cap=cfg["profile"]["T_cap"],
                       t_s=cfg["profile"]["t_s"], period=period,
                       T_lo=cfg["profile"]["T_lo"], accent=cfg["profile"]["accent"],
                       theta_edge=cfg["profile"]["theta_edge"],
                       rho_shape=cfg["profile"]["rho_shape"],
                       rho_edge=cfg["profile"]["rho_edge"],
                       gamma=cfg["phase"]["gamma"])
    src = SourceSpec(phase=PhaseParams(gamma=cfg["phase"]["gamma"]), profile=prof,
                     zeta=ZetaSpec(xi0=cfg["source"]["xi0"]),
                     harmonics=tuple(cfg["profile"]["harmonics"]))
    return Experiment(cfg=cfg, sym=sym, src=src)
