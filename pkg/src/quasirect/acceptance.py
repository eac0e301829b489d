"""The acceptance suite: one function per criterion, shared by CLI and pytest.

Each criterion runs at its pinned tolerance, writes its CSV + manifest into
the output directory, and returns a CriterionResult with the measured
numbers. Expensive linear-field solves are cached per (eps, harmonics) and
shared across criteria. Criterion 10 re-runs the CSV-emitting pipelines
(twice serially, once with 8 workers) and compares bytes.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .artifacts import write_csv, write_manifest
from .asymptotics import (U_lattice_asym, nonlinear_limit_profile, profile_params)
from .config import Experiment, build_experiment
from .fitting import fit_order, monotone_decreasing
from .linear_solver import LinearField
from .nonlinear import NonlinearitySpec, kernel_K, picard_W
from .oscquad import QuadResult, integrate_osc_3d_bruteforce
from .smooth import CutoffSpec
from .sources import A_eps_sq
from .symbols import make_whistler_symbol, verify_assumptions
from .toy_ode import ToyConfig, solve_toy_nonlinear, tan_reference
from .wavepackets import (find_critical_point, index_sets, packet_prefactor,
                          packet_u_k, sum_packets)


@dataclass
class CriterionResult:
    cid: int
    name: str
    passed: bool
    details: Dict
    runtime_s: float
    artifacts: List[str] = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.cid}: {self.name} ({self.runtime_s:.1f}s)"


class OracleCache:
    """LinearField instances shared across criteria (keyed by eps, harmonics)."""

    def __init__(self, exp: Experiment):
        self.exp = exp
        self._fields: Dict = {}

    def field(self, eps: float, harmonics=(1,)) -> LinearField:
        key = (eps, tuple(harmonics))
        if key not in self._fields:
            self._fields[key] = self.exp.field(eps, harmonics)
        return self._fields[key]


def _toy_cfg(exp: Experiment, eps: float, **over) -> ToyConfig:
    t = dict(exp.cfg["toy"])
    t["eps"] = eps
    t["gamma"] = exp.gamma
    t.update(over)
    return ToyConfig(**t)


# ----------------------------------------------------------------------------
# Criteria
# ----------------------------------------------------------------------------

def criterion_1(exp: Experiment, out: Path, cache=None) -> CriterionResult:
    """Whistler symbol audit: fitted (q, ell) = (2, -6) within 1%."""
    t0 = time.time()
    sym = make_whistler_symbol(D=exp.cfg["symbol"]["D"])
    rep = verify_assumptions(sym, xi_max=1e4, tol=0.01)
    ok = (abs(rep.q_hat - 2.0) <= 0.01 * 2.0
          and abs(rep.ell_hat - (-6.0)) <= 0.01 * 6.0
          and rep.passed())
    rt = time.time() - t0
    rows = [["q_hat", rep.q_hat], ["ell_hat", rep.ell_hat],
            ["omega_inf_hat", rep.omega_inf_hat],
            ["evenness_residual", rep.evenness_residual],
            ["dp_limit_hat", rep.dp_limit_hat],
            ["gap_coeff_hat", rep.gap_coeff_hat],
            ["derivative_ratio_max", rep.derivative_ratio_max]]
    p = write_csv(out / "c1_symbol_audit.csv", "symbol-audit v1",
                  ["quantity", "value"], rows)
    write_manifest(p, exp.hash(), "symbol-audit v1", {"flags": rep.flags})
    details = {"q_hat": rep.q_hat, "ell_hat": rep.ell_hat,
               "runtime_budget_s": 5.0, "flags": rep.flags}
    return CriterionResult(1, "whistler symbol audit", ok and rt < 5.0,
                           details, rt, [str(p)])


def criterion_2(exp: Experiment, out: Path, cache=None) -> CriterionResult:
    """Toy tan law: fitted order of |U(1) - A tan(A)| >= 0.8 over the ladder."""
    t0 = time.time()
    ladder = exp.ladder()
    rows = []
    errs = []
    for eps in ladder:
        cfg = _toy_cfg(exp, eps)
        tr = solve_toy_nonlinear(cfg)
        ref = tan_reference(cfg, cfg.T_end)
        err = abs(tr.U_end - ref)
        errs.append(err)
        rows.append([eps, tr.U_end.real, tr.U_end.imag, complex(ref).real,
                     complex(ref).imag, err])
    fit = fit_order(ladder, errs)
    ok = fit.slope >= 0.8
    p = write_csv(out / "c2_toy_tan_law.csv", "toy-tan v1",
                  ["eps", "ReU", "ImU", "Re_tan_ref", "Im_tan_ref", "err"], rows)
    write_manifest(p, exp.hash(), "toy-tan v1", {"slope": fit.slope})
    return CriterionResult(2, "toy tan law order >= 0.8",
                           ok, {"slope": fit.slope, "errors": errs,
                                "ladder": ladder}, time.time() - t0, [str(p)])


def criterion_3(exp: Experiment, out: Path, cache=None) -> CriterionResult:
    """Toy harmonic dichotomy: max_{n != 1}|U| / |U_{n=1}| decays, order >= 0.4."""
    t0 = time.time()
    ladder = exp.ladder()
    others = [-2, 0, 2, 3]
    rows, ratios = [], []
    for eps in ladder:
        u1 = abs(solve_toy_nonlinear(_toy_cfg(exp, eps, n=1)).U_end)
        u_others = [abs(solve_toy_nonlinear(_toy_cfg(exp, eps, n=n)).U_end)
                    for n in others]
        ratio = max(u_others) / u1
        ratios.append(ratio)
        rows.append([eps, u1] + u_others + [ratio])
    fit = fit_order(ladder, ratios)
    ok = fit.slope >= 0.4 and monotone_decreasing(ratios)
    p = write_csv(out / "c3_toy_harmonics.csv", "toy-harmonics v1",
                  ["eps", "U_n1"] + [f"U_n{n}" for n in others] + ["ratio"], rows)
    write_manifest(p, exp.hash(), "toy-harmonics v1", {"slope": fit.slope})
    return CriterionResult(3, "toy harmonic dichotomy order >= 0.4", ok,
                           {"slope": fit.slope, "ratios": ratios,
                            "ladder": ladder}, time.time() - t0, [str(p)])


def _packet_brute_config(exp: Experiment):
    """Standalone packet-validation source: long T_cap so that k = 40 is live
    at eps = 1/20; flat accent keeps the amplitude curvature small."""
    import dataclasses
    prof = dataclasses.replace(exp.src.profile, T_cap=8.0, T_lo=1.0,
                               theta_edge=0.8, accent=0.05)
    return dataclasses.replace(exp.src, profile=prof)


def criterion_4(exp: Experiment, out: Path, cache=None) -> CriterionResult:
    """Single packet vs 3-D brute force at eps = 1/20, k = 40 (<= 5e-2),
    error decreasing at eps = 1/40."""
    t0 = time.time()
    sym = exp.sym
    src = _packet_brute_config(exp)
    gamma = src.gamma
    k, x = 40, 0.01
    cut = CutoffSpec()
    rho_hat = src.rho_hat()
    rows, errs = [], []
    for eps, nodes in ((1 / 20, 180), (1 / 40, 260)):
        t = 1.5 * src.profile.T_cap / eps
        cp = find_critical_point(sym, gamma, k, t, x)
        pk = packet_u_k(eps, sym, src, cp)
        dxi = eps * rho_hat.effective_width(rel=1e-4)
        s_hi = 2.0 * math.pi / 3.0
        box = [(-s_hi, s_hi), (-src.profile.r, src.profile.r),
               (-s_hi - dxi, s_hi + dxi)]
        sgn = 1.0 if k % 2 == 0 else -1.0

        def phase(s, y, xi):
            kxi = k * math.pi + xi
            return ((k * math.pi - t) * sym.p(kxi) + s * (sym.p(kxi) - 1.0)
                    + (x - y) * xi + s * y - sgn * gamma * np.cos(s))

        def amp(s, y, xi):
            return (src.zeta.zeta(1, k * math.pi + xi)
                    * src.a_m(1, eps * (k * math.pi + s), k * math.pi + s, y)
                    * cut.chi(s / (2.0 * math.pi / 3.0))
                    * cut.chi((xi - s) / dxi))

        res: QuadResult = integrate_osc_3d_bruteforce(amp, phase, box, eps,
                                                      nodes, tol=1e-3)
        u_ref = packet_prefactor(eps, gamma, k, x) * res.value
        err = abs(pk.value - u_ref) / abs(u_ref)
        errs.append(err)
        rows.append([eps, pk.value.real, pk.value.imag, u_ref.real, u_ref.imag,
                     err, res.error, int(res.converged)])
    ok = errs[0] <= 5e-2 and errs[1] < errs[0]
    p = write_csv(out / "c4_packet_bruteforce.csv", "packet-brute v1",
                  ["eps", "Re_packet", "Im_packet", "Re_brute", "Im_brute",
                   "rel_err", "quad_err", "quad_converged"], rows)
    write_manifest(p, exp.hash(), "packet-brute v1",
                   {"errors": errs, "note": "windowed-vs-formula remainder is "
                    "O(eps^{1/(q+1)}) per the source analysis"})
    return CriterionResult(4, "packet vs 3-D brute force (<= 5e-2 at eps=1/20, decreasing)",
                           ok, {"errors": errs, "eps": [1 / 20, 1 / 40],
                                "decreasing": errs[1] < errs[0]},
                           time.time() - t0, [str(p)])


def criterion_5(exp: Experiment, out: Path, cache: OracleCache) -> CriterionResult:
    """Packet sum vs spectral oracle: sup relative difference <= 2% at eps=1/100."""
    t0 = time.time()
    eps = 1 / 100
    fld = cache.field(eps)
    sets = index_sets(eps, exp.sym, exp.src)
    T_cap = exp.src.profile.T_cap
    zs = np.array([0.0, 1.0, -1.0, 2.0, -2.0, 0.5])
    rows, sup_diff, sup_oracle = [], 0.0, 0.0
    for T in (1.25 * T_cap, 1.5 * T_cap):
        Uo = fld.U_at(T, zs)
        Up = np.array([sum_packets(eps, exp.sym, exp.src, T, z, sets).U for z in zs])
        sup_diff = max(sup_diff, float(np.max(np.abs(Up - Uo))))
        sup_oracle = max(sup_oracle, float(np.max(np.abs(Uo))))
        for z, uo, up in zip(zs, Uo, Up):
            rows.append([T, z, uo.real, uo.imag, up.real, up.imag, abs(up - uo)])
    rel = sup_diff / sup_oracle
    ok = rel <= 0.02
    p = write_csv(out / "c5_packets_vs_oracle.csv", "packets-oracle v1",
                  ["T", "z", "Re_oracle", "Im_oracle", "Re_packets",
                   "Im_packets", "abs_diff"], rows)
    write_manifest(p, exp.hash(), "packets-oracle v1",
                   {"rel_sup_diff": rel, **fld.diagnostics(1.5 * T_cap)})
    return CriterionResult(5, "packet sum vs oracle <= 2% at eps=1/100", ok,
                           {"rel_sup_diff": rel}, time.time() - t0, [str(p)])


def criterion_6(exp: Experiment, out: Path, cache: OracleCache,
                eps_track: float = 1 / 400) -> CriterionResult:
    """Constructive/destructive dichotomy across the ladder."""
    t0 = time.time()
    ladder = exp.ladder()
    T = 1.5 * exp.src.profile.T_cap
    rows = []
    lattice_norm, off1, off05 = [], [], []
    track_rel = None
    for eps in ladder:
        fld = cache.field(eps)
        zs = np.array([0.0, 1.0, 2.0, 0.5])
        U = fld.U_at(T, zs)
        A2 = abs(A_eps_sq(exp.gamma, eps))
        lattice_norm.append(abs(U[2]) / A2)
        off1.append(abs(U[1]))
        off05.append(abs(U[3]))
        par = profile_params(eps, exp.sym, exp.src)
        UA = U_lattice_asym(par, T)
        rel = abs(U[2] - UA) / abs(UA)
        if abs(eps - eps_track) < 1e-12:
            track_rel = rel
        rows.append([eps, abs(U[0]), abs(U[1]), abs(U[2]), abs(U[3]),
                     A2, abs(UA), rel])
    spread = (max(lattice_norm) - min(lattice_norm)) / max(lattice_norm)
    ok = (spread < 0.5 and track_rel is not None and track_rel <= 0.10
          and monotone_decreasing(off1) and monotone_decreasing(off05))
    p = write_csv(out / "c6_dichotomy.csv", "dichotomy v1",
                  ["eps", "absU_z0", "absU_z1", "absU_z2", "absU_z05",
                   "absA2", "absU_asym", "rel_vs_asym"], rows)
    write_manifest(p, exp.hash(), "dichotomy v1",
                   {"spread": spread, "track_rel": track_rel})
    return CriterionResult(
        6, "constructive/destructive dichotomy", ok,
        {"lattice_normalized": lattice_norm, "spread": spread,
         "track_rel_at_smallest": track_rel, "off_lattice_z1": off1,
         "off_lattice_z05": off05, "ladder": ladder},
        time.time() - t0, [str(p)])


def criterion_7(exp: Experiment, out: Path, cache=None) -> CriterionResult:
    """Kernel laws: K_tau(0)/sqrt(tau) steady within 10%; |K_tau(1)| slope <= 1/4."""
    t0 = time.time()
    taus = [1e2, 1e3, 1e4]
    k0 = [kernel_K(tau, 0.0, exp.sym) for tau in taus]
    ratio0 = [abs(v) / math.sqrt(tau) for v, tau in zip(k0, taus)]
    spread = (max(ratio0) - min(ratio0)) / max(ratio0)
    k1 = [abs(kernel_K(tau, 1.0, exp.sym)) for tau in taus]
    fit = fit_order(taus, k1)   # slope in tau
    ok = spread < 0.10 and fit.slope <= 0.25
    rows = [[tau, abs(v0), r0, v1] for tau, v0, r0, v1 in zip(taus, k0, ratio0, k1)]
    p = write_csv(out / "c7_kernel.csv", "kernel v1",
                  ["tau", "absK0", "absK0_over_sqrt_tau", "absK_y1"], rows)
    write_manifest(p, exp.hash(), "kernel v1",
                   {"sqrt_spread": spread, "y1_slope": fit.slope})
    return CriterionResult(7, "kernel tau^(1/2) law and y=1 growth", ok,
                           {"sqrt_spread": spread, "y1_slope": fit.slope},
                           time.time() - t0, [str(p)])


def criterion_8(exp: Experiment, out: Path, cache: OracleCache) -> CriterionResult:
    """Linearizability at g = 2, iota = 1: fitted order of sup_z |W| >= 0.5."""
    t0 = time.time()
    ladder = exp.ladder()
    spec = NonlinearitySpec(lam=exp.cfg["nonlinearity"]["lam"], j1=2, j2=0,
                            nu=0.0, omega=0.0, iota=1.0)
    T = 1.5 * exp.src.profile.T_cap
    sups, rows = [], []
    for eps in ladder:
        W = picard_W(eps, spec, cache.field(eps), T, tol=exp.tol * 100)
        sup = W.sup_abs()
        sups.append(sup)
        rows.append([eps, sup])
    fit = fit_order(ladder, sups)
    ok = fit.slope >= 0.5
    p = write_csv(out / "c8_linearizability.csv", "gauge-sweep v1",
                  ["eps", "sup_absW"], rows)
    write_manifest(p, exp.hash(), "gauge-sweep v1", {"slope": fit.slope})
    return CriterionResult(8, "g=2 linearizability order >= 0.5 (theory 5/6)", ok,
                           {"slope": fit.slope, "sups": sups, "ladder": ladder},
                           time.time() - t0, [str(p)])


def criterion_9(exp: Experiment, out: Path, cache: OracleCache) -> CriterionResult:
    """Resonant profile: |W(T,0) - limit| decreasing; |W(T,1)|/|W(T,0)| decreasing."""
    t0 = time.time()
    ladder = sorted(exp.ladder())[:2]       # two smallest eps
    spec = NonlinearitySpec(lam=exp.cfg["nonlinearity"]["lam"], j1=2, j2=0,
                            nu=0.0, omega=-1.0, iota=exp.cfg["nonlinearity"]["iota"])
    T = 1.5 * exp.src.profile.T_cap
    diffs, ratios, rows = [], [], []
    for eps in sorted(ladder, reverse=True):   # big eps first
        W = picard_W(eps, spec, cache.field(eps), T, tol=exp.tol * 100)
        w0, w1 = W.at(np.array([0.0, 1.0]))
        par = profile_params(eps, exp.sym, exp.src)
        NL = nonlinear_limit_profile(par, T)
        diffs.append(abs(w0 - NL))
        ratios.append(abs(w1) / abs(w0))
        rows.append([eps, w0.real, w0.imag, abs(w1), NL.real, NL.imag,
                     abs(w0 - NL), abs(w1) / abs(w0)])
    ok = monotone_decreasing(diffs) and monotone_decreasing(ratios)
    p = write_csv(out / "c9_resonant_profile.csv", "nonlinear-profile v1",
                  ["eps", "ReW0", "ImW0", "absW1", "Re_limit", "Im_limit",
                   "diff_to_limit", "off_lattice_ratio"], rows)
    write_manifest(p, exp.hash(), "nonlinear-profile v1",
                   {"diffs": diffs, "ratios": ratios})
    return CriterionResult(9, "resonant nonlinear profile convergence", ok,
                           {"diffs": diffs, "ratios": ratios,
                            "eps": sorted(ladder, reverse=True)},
                           time.time() - t0, [str(p)])


# ----------------------------------------------------------------------------
# Determinism (criterion 10)
# ----------------------------------------------------------------------------

_DET_TASKS: Dict[str, Callable] = {}


def _det_task(name):
    def deco(fn):
        _DET_TASKS[name] = fn
        return fn
    return deco


@_det_task("symbol")
def _det_symbol(cfg_dict, out: str) -> str:
    exp = build_experiment(cfg_dict)
    res = criterion_1(exp, Path(out))
    return res.artifacts[0]


@_det_task("toy")
def _det_toy(cfg_dict, out: str) -> str:
    exp = build_experiment(cfg_dict)
    res = criterion_2(exp, Path(out))
    return res.artifacts[0]


@_det_task("kernel")
def _det_kernel(cfg_dict, out: str) -> str:
    exp = build_experiment(cfg_dict)
    res = criterion_7(exp, Path(out))
    return res.artifacts[0]


@_det_task("field")
def _det_field(cfg_dict, out: str) -> str:
    exp = build_experiment(cfg_dict)
    eps = 1 / 50
    fld = LinearField(eps, exp.sym, exp.src, harmonics=[1], tol=exp.tol)
    T = 1.5 * exp.src.profile.T_cap
    zs = np.linspace(-4.0, 4.0, 33)
    U = fld.U_at(T, zs)
    rows = [[T, z, u.real, u.imag, abs(u)] for z, u in zip(zs, U)]
    p = write_csv(Path(out) / "det_field.csv", "linear-field v1",
                  ["T", "z", "ReU", "ImU", "absU"], rows)
    write_manifest(p, config_hash_of(cfg_dict), "linear-field v1", {})
    return str(p)


@_det_task("packets")
def _det_packets(cfg_dict, out: str) -> str:
    exp = build_experiment(cfg_dict)
    eps = 1 / 50
    sets = index_sets(eps, exp.sym, exp.src)
    T = 1.5 * exp.src.profile.T_cap
    rows = []
    for z in (0.0, 1.0, 2.0):
        ps = sum_packets(eps, exp.sym, exp.src, T, z, sets, keep_packets=True)
        for pk in ps.packets:
            rows.append([z, pk.cp.k, pk.cp.s, pk.cp.y, pk.detS, pk.signature,
                         abs(pk.b), pk.psi])
    p = write_csv(Path(out) / "det_packets.csv", "packets v1",
                  ["z", "k", "s_k", "y_k", "detS", "sign", "abs_b", "Psi"], rows)
    write_manifest(p, config_hash_of(cfg_dict), "packets v1", {})
    return str(p)


@_det_task("picard")
def _det_picard(cfg_dict, out: str) -> str:
    exp = build_experiment(cfg_dict)
    eps = 1 / 100
    fld = LinearField(eps, exp.sym, exp.src, harmonics=[1], tol=exp.tol)
    spec = NonlinearitySpec(lam=1.0, j1=2, j2=0, nu=0.0, omega=-1.0,
                            iota=exp.cfg["nonlinearity"]["iota"])
    T = 1.5 * exp.src.profile.T_cap
    W = picard_W(eps, spec, fld, T, tol=exp.tol * 100)
    vals = W.at(np.array([0.0, 0.5, 1.0, 2.0]))
    rows = [[T, z, v.real, v.imag] for z, v in zip((0.0, 0.5, 1.0, 2.0), vals)]
    p = write_csv(Path(out) / "det_picard.csv", "nonlinear-profile v1",
                  ["T", "z", "ReW", "ImW"], rows)
    write_manifest(p, config_hash_of(cfg_dict), "nonlinear-profile v1", {})
    return str(p)


def config_hash_of(cfg_dict) -> str:
    from .config import config_hash
    return config_hash(cfg_dict)


def _run_det_task(args):
    name, cfg_dict, out = args
    return name, _DET_TASKS[name](cfg_dict, out)


def criterion_10(exp: Experiment, out: Path, cache=None,
                 threads: int = 8) -> CriterionResult:
    """Byte-identical CSVs across two serial runs and a threaded run.

    The cheap pipelines run at full config; the heavy field/picard pipelines
    run at their two cheapest ladder points (identical code paths at all eps).
    """
    t0 = time.time()
    names = sorted(_DET_TASKS)
    runs: Dict[str, List[bytes]] = {n: [] for n in names}
    for tag in ("a", "b"):
        sub = out / f"det_{tag}"
        for name in names:
            pth = _DET_TASKS[name](exp.cfg, str(sub))
            runs[name].append(Path(pth).read_bytes())
    sub = out / "det_par"
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for name, pth in pool.map(_run_det_task,
                                  [(n, exp.cfg, str(sub / n)) for n in names]):
            runs[name].append(Path(pth).read_bytes())
    mismatches = [n for n, blobs in runs.items()
                  if not all(b == blobs[0] for b in blobs)]
    ok = not mismatches
    rows = [[n, int(n not in mismatches)] for n in names]
    p = write_csv(out / "c10_determinism.csv", "determinism v1",
                  ["pipeline", "byte_identical"], rows)
    write_manifest(p, exp.hash(), "determinism v1",
                   {"threads": threads, "mismatches": mismatches})
    return CriterionResult(10, "determinism across runs and 1 vs 8 workers", ok,
                           {"mismatches": mismatches, "pipelines": names},
                           time.time() - t0, [str(p)])


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
            9: criterion_9, 10: criterion_10}


def run_all(exp: Experiment, out: Path, which: Optional[Sequence[int]] = None,
            echo: Callable[[str], None] = print) -> List[CriterionResult]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    cache = OracleCache(exp)
    results = []
    for cid in sorted(which or CRITERIA):
        res = CRITERIA[cid](exp, out, cache)
        echo(res.line())
        results.append(res)
    return results
