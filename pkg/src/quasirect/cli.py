"""Command-line surface: experiment orchestration and artifact emission.

Subcommands: symbol-check, toy-ode, linear-field, packets, interference-scan,
profiles, gauge-sweep, nonlinear-profile, accept. Shared flags: --config,
--set path=value (repeatable), --out, --threads, --tol-scale.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List

import numpy as np

from . import acceptance
from .artifacts import write_csv, write_manifest
from .asymptotics import profile_params, linear_profile, nonlinear_limit_profile, U_lattice_asym
from .config import Experiment, build_experiment, load_config
from .nonlinear import NonlinearitySpec, classify_gauge, picard_W
from .symbols import verify_assumptions
from .toy_ode import ToyConfig, solve_toy_nonlinear, tan_reference
from .wavepackets import index_sets, sum_packets


def _common(sub):
    sub.add_argument("--config", default=None, help="TOML config file")
    sub.add_argument("--set", action="append", default=[], metavar="PATH=VALUE",
                     help="override a config key (repeatable)")
    sub.add_argument("--out", default=None, help="output directory")
    sub.add_argument("--threads", type=int, default=1)
    sub.add_argument("--tol-scale", type=float, default=1.0)


def _experiment(args) -> Experiment:
    cfg = load_config(args.config, args.set, tol_scale=args.tol_scale)
    if args.out:
        cfg["run"]["out"] = args.out
    return build_experiment(cfg)


def _out(exp: Experiment) -> Path:
    p = Path(exp.cfg["run"]["out"])
    p.mkdir(parents=True, exist_ok=True)
    return p


def cmd_symbol_check(args) -> int:
    exp = _experiment(args)
    xi_max = args.xi_max
    rep = verify_assumptions(exp.sym, xi_max=xi_max, tol=0.01)
    payload = {"kind": exp.cfg["symbol"]["kind"], "xi_max": xi_max,
               "q_hat": rep.q_hat, "ell_hat": rep.ell_hat,
               "omega_inf_hat": rep.omega_inf_hat,
               "evenness_residual": rep.evenness_residual,
               "dp_limit_hat": rep.dp_limit_hat,
               "gap_coeff_hat": rep.gap_coeff_hat,
               "derivative_ratio_max": rep.derivative_ratio_max,
               "flags": rep.flags, "passed": rep.passed(),
               "config_hash": exp.hash()}
    out = _out(exp) / "symbol_check.json"
    out.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    print(json.dumps(payload, indent=1, sort_keys=True))
    return 0 if rep.passed() else 1


def cmd_toy_ode(args) -> int:
    exp = _experiment(args)
    t = dict(exp.cfg["toy"])
    t["gamma"] = exp.gamma
    cfg = ToyConfig(**t)
    tr = solve_toy_nonlinear(cfg)
    ref = tan_reference(cfg, tr.T)
    stride = max(1, tr.T.size // args.samples)
    rows = [[tr.T[i], tr.U[i].real, tr.U[i].imag, tr.U_lin[i].real,
             tr.U_lin[i].imag, complex(ref[i]).real, complex(ref[i]).imag]
            for i in range(0, tr.T.size, stride)]
    p = write_csv(_out(exp) / "toy_ode.csv", "toy-ode v1",
                  ["T", "ReU", "ImU", "ReU_lin", "ImU_lin", "Re_tan_ref", "Im_tan_ref"],
                  rows)
    write_manifest(p, exp.hash(), "toy-ode v1",
                   {"iterations": tr.iterations, "warnings": tr.warnings,
                    "converged": tr.converged})
    print(f"wrote {p} (U_end = {tr.U_end:.6f})")
    return 0


def _field_rows(exp: Experiment, eps: float, T_list, z):
    fld = exp.field(eps, exp.src.harmonics)
    rows = []
    diags = {}
    for T in T_list:
        U = fld.U_at(T, z)
        rows += [[eps, T, zi, u.real, u.imag, abs(u)] for zi, u in zip(z, U)]
        diags[f"T={T}"] = fld.diagnostics(T)
    return rows, diags


def cmd_linear_field(args) -> int:
    exp = _experiment(args)
    T_list = [float(s) for s in args.times.split(",")] if args.times \
        else [t * exp.src.profile.T_cap for t in exp.cfg["run"]["T_list"]]
    if args.positions == "auto":
        z = np.array(exp.cfg["run"]["z_list"], dtype=float)
    else:
        z = np.array([float(s) for s in args.positions.split(",")])
    ladder = exp.ladder() if args.ladder else [exp.ladder()[0]]
    all_rows, diags = [], {}
    if args.threads > 1 and len(ladder) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            futs = [pool.submit(_field_rows, exp, e, T_list, z) for e in ladder]
            for e, f in zip(ladder, futs):
                rows, d = f.result()
                all_rows += rows
                diags[f"eps={e}"] = d
    else:
        for e in ladder:
            rows, d = _field_rows(exp, e, T_list, z)
            all_rows += rows
            diags[f"eps={e}"] = d
    p = write_csv(_out(exp) / "linear_field.csv", "linear-field v1",
                  ["eps", "T", "z", "ReU", "ImU", "absU"], all_rows)
    write_manifest(p, exp.hash(), "linear-field v1", diags)
    print(f"wrote {p}")
    return 0


def cmd_packets(args) -> int:
    exp = _experiment(args)
    eps = args.eps or exp.ladder()[0]
    sets = index_sets(eps, exp.sym, exp.src)
    T = args.T if args.T else 1.5 * exp.src.profile.T_cap
    rows = []
    for z in np.array(exp.cfg["run"]["z_list"], dtype=float):
        ps = sum_packets(eps, exp.sym, exp.src, T, float(z), sets, keep_packets=True)
        if args.dump_packets:
            rows += [[z, pk.cp.k, pk.cp.s, pk.cp.y, pk.detS, pk.signature,
                      abs(pk.b), pk.psi] for pk in ps.packets]
        else:
            rows.append([z, ps.U.real, ps.U.imag, abs(ps.U), ps.n_live])
    if args.dump_packets:
        p = write_csv(_out(exp) / "packets.csv", "packets v1",
                      ["z", "k", "s_k", "y_k", "detS", "sign", "abs_b", "Psi"], rows)
    else:
        p = write_csv(_out(exp) / "packet_sum.csv", "packet-sum v1",
                      ["z", "ReU", "ImU", "absU", "n_live"], rows)
    write_manifest(p, exp.hash(), "packets v1",
                   {"eps": eps, "T": T, "c": sets.c, "c1": sets.c1})
    print(f"wrote {p}")
    return 0


def cmd_interference_scan(args) -> int:
    exp = _experiment(args)
    eps = args.eps or exp.ladder()[0]
    T = args.T if args.T else 1.5 * exp.src.profile.T_cap
    z = np.arange(-4.0, 4.0 + 1e-9, 0.25)
    if args.solver == "oracle":
        fld = exp.field(eps)
        U = fld.U_at(T, z)
        diags = fld.diagnostics(T)
    else:
        sets = index_sets(eps, exp.sym, exp.src)
        U = np.array([sum_packets(eps, exp.sym, exp.src, T, float(zi), sets).U
                      for zi in z])
        diags = {"c": sets.c, "c1": sets.c1}
    rows = [[T, zi, u.real, u.imag, abs(u)] for zi, u in zip(z, U)]
    p = write_csv(_out(exp) / "interference_scan.csv", "interference-scan v1",
                  ["T", "z", "ReU", "ImU", "absU"], rows)
    write_manifest(p, exp.hash(), "interference-scan v1",
                   {"eps": eps, "solver": args.solver, **diags})
    print(f"wrote {p}")
    return 0


def cmd_profiles(args) -> int:
    exp = _experiment(args)
    eps = args.eps or exp.ladder()[0]
    par = profile_params(eps, exp.sym, exp.src)
    T_list = [float(s) for s in args.T_list.split(",")] if args.T_list else \
        [1.0, 1.25, 1.5, 1.75, 2.0]
    rows = []
    for T in T_list:
        Le = linear_profile(par, T, "even")
        UA = U_lattice_asym(par, T)
        NL = nonlinear_limit_profile(par, T)
        rows.append([T, Le.real, Le.imag, UA.real, UA.imag, NL.real, NL.imag])
    p = write_csv(_out(exp) / "profiles.csv", "profiles v1",
                  ["T", "ReL", "ImL", "ReU_asym", "ImU_asym",
                   "ReW_limit", "ImW_limit"], rows)
    write_manifest(p, exp.hash(), "profiles v1", {"eps": eps})
    print(f"wrote {p}")
    return 0


def cmd_gauge_sweep(args) -> int:
    exp = _experiment(args)
    nl = exp.cfg["nonlinearity"]
    rows = []
    gauges = [(2, 0, 0.0), (1, 1, 0.0), (2, 0, -1.0), (1, 1, 0.5)]
    T = 1.5 * exp.src.profile.T_cap
    for (j1, j2, omega) in gauges:
        spec = NonlinearitySpec(lam=nl["lam"], j1=j1, j2=j2,
                                nu=2.0 - j1 - j2, omega=omega, iota=1.0)
        gc = classify_gauge(spec, exp.sym)
        sups = []
        for eps in exp.ladder():
            fld = exp.field(eps)
            W = picard_W(eps, spec, fld, T, tol=exp.tol * 100)
            sups.append(W.sup_abs())
        rows.append([gc.g, gc.kind, gc.c_g] + sups)
    eps_cols = [f"sup_absW_eps{i}" for i in range(len(exp.ladder()))]
    p = write_csv(_out(exp) / "gauge_sweep.csv", "gauge-sweep v1",
                  ["gauge", "class", "c_g"] + eps_cols, rows)
    write_manifest(p, exp.hash(), "gauge-sweep v1", {"ladder": exp.ladder()})
    print(f"wrote {p}")
    return 0


def cmd_nonlinear_profile(args) -> int:
    exp = _experiment(args)
    nl = exp.cfg["nonlinearity"]
    spec = NonlinearitySpec(lam=nl["lam"], j1=nl["j1"], j2=nl["j2"],
                            nu=nl["nu"], omega=nl["omega"], iota=nl["iota"])
    gc = classify_gauge(spec, exp.sym)
    T = args.T if args.T else 1.5 * exp.src.profile.T_cap
    rows = []
    for eps in (exp.ladder() if args.ladder else [exp.ladder()[0]]):
        fld = exp.field(eps)
        W = picard_W(eps, spec, fld, T, tol=exp.tol * 100)
        vals = W.at(np.array([0.0, 1.0, 2.0]))
        par = profile_params(eps, exp.sym, exp.src)
        NL = nonlinear_limit_profile(par, T) if spec.gauge == 1.0 else 0.0
        rows.append([eps, vals[0].real, vals[0].imag, abs(vals[1]), abs(vals[2]),
                     complex(NL).real, complex(NL).imag])
    p = write_csv(_out(exp) / "nonlinear_profile.csv", "nonlinear-profile v1",
                  ["eps", "ReW0", "ImW0", "absW1", "absW2", "Re_limit", "Im_limit"],
                  rows)
    write_manifest(p, exp.hash(), "nonlinear-profile v1",
                   {"gauge": gc.g, "class": gc.kind,
                    "general_parity_assembly": "pi-periodic reduction"
                    if exp.src.profile.period == math.pi else "four-parity extrapolation"})
    print(f"wrote {p}")
    return 0


def cmd_config(args) -> int:
    """Print the resolved configuration (the generated defaults reference)."""
    exp = _experiment(args)
    print(json.dumps(exp.cfg, indent=1, sort_keys=True))
    print(f"# config_hash = {exp.hash()}", file=sys.stderr)
    return 0


def cmd_accept(args) -> int:
    exp = _experiment(args)
    which = [int(s) for s in args.only.split(",")] if args.only else None
    results = acceptance.run_all(exp, _out(exp), which=which)
    n_fail = sum(not r.passed for r in results)
    summary = {"passed": [r.cid for r in results if r.passed],
               "failed": [r.cid for r in results if not r.passed]}
    (_out(exp) / "acceptance_summary.json").write_text(
        json.dumps({**summary, "details": [
            {"cid": r.cid, "name": r.name, "passed": r.passed,
             "runtime_s": r.runtime_s, "details": r.details} for r in results]},
            indent=1, default=str) + "\n")
    print(f"{len(results) - n_fail}/{len(results)} criteria passed")
    return 0 if n_fail == 0 else 1


def main(argv: List[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="quasirect",
                                 description="semiclassical dispersive-wave laboratory")
    sp = ap.add_subparsers(dest="cmd", required=True)

    s = sp.add_parser("symbol-check", help="audit the dispersion symbol hypotheses")
    _common(s)
    s.add_argument("--xi-max", type=float, default=1e4)
    s.set_defaults(fn=cmd_symbol_check)

    s = sp.add_parser("toy-ode", help="solve the filtered toy model")
    _common(s)
    s.add_argument("--samples", type=int, default=400)
    s.set_defaults(fn=cmd_toy_ode)

    s = sp.add_parser("linear-field", help="spectral oracle field samples")
    _common(s)
    s.add_argument("--times", default=None, help="comma list of T values")
    s.add_argument("--positions", default="auto", help="auto|comma list of z")
    s.add_argument("--ladder", action="store_true", help="run the whole eps ladder")
    s.set_defaults(fn=cmd_linear_field)

    s = sp.add_parser("packets", help="wave-packet sums and per-packet dumps")
    _common(s)
    s.add_argument("--eps", type=float, default=None)
    s.add_argument("--T", type=float, default=None)
    s.add_argument("--dump-packets", action="store_true")
    s.set_defaults(fn=cmd_packets)

    s = sp.add_parser("interference-scan", help="|U| over a z grid")
    _common(s)
    s.add_argument("--eps", type=float, default=None)
    s.add_argument("--T", type=float, default=None)
    s.add_argument("--solver", choices=["packets", "oracle"], default="packets")
    s.set_defaults(fn=cmd_interference_scan)

    s = sp.add_parser("profiles", help="asymptotic limit profiles")
    _common(s)
    s.add_argument("--eps", type=float, default=None)
    s.add_argument("--T-list", default=None)
    s.set_defaults(fn=cmd_profiles)

    s = sp.add_parser("gauge-sweep", help="sup|W| across gauge classes")
    _common(s)
    s.set_defaults(fn=cmd_gauge_sweep)

    s = sp.add_parser("nonlinear-profile", help="first Picard iterate vs limit")
    _common(s)
    s.add_argument("--T", type=float, default=None)
    s.add_argument("--ladder", action="store_true")
    s.set_defaults(fn=cmd_nonlinear_profile)

    s = sp.add_parser("config", help="print the resolved configuration reference")
    _common(s)
    s.set_defaults(fn=cmd_config)

    s = sp.add_parser("accept", help="run the acceptance suite")
    _common(s)
    s.add_argument("--only", default=None, help="comma list of criterion ids")
    s.set_defaults(fn=cmd_accept)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:          # numeric sentinels -> nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
