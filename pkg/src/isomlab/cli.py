"""Command-line front end.

Each subcommand maps onto one laboratory pipeline and prints a single JSON
report on stdout; `--csv DIR` additionally writes plot tables.  Exit codes:
0 for success / PASS, 2 for a FAIL verdict, 1 for malformed input or a
violated precondition (the diagnostic is printed on stderr).

Tolerances are flags with documented defaults: --tol 1e-10 (integration),
--mtol 1e-6 (matrix comparisons), --order 10 (series truncation).  Reports
are deterministic for identical inputs and flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import geometry, io
from .errors import IsomlabError
from .formal import check_resonances, compute_formal_coefficients
from .fuchsian import (
    fuchs_monodromy,
    integrate_schlesinger,
    kv_family,
    schlesinger_residual,
)
from .isoflow import DeformationState, UPath, integrate_flow
from .levelt import build_levelt_solution, compute_levelt_exponents, monodromy_exponential
from .odeengine import StokesConfig, stokes_matrix
from .verify import collect_data, data_drift, stokes_relation_check, verify_coalescence

PASS, FAIL = "PASS", "FAIL"


def _emit(report: dict) -> None:
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _csv_dir(args):
    if args.csv:
        os.makedirs(args.csv, exist_ok=True)
    return args.csv


def _need_irregular(parts):
    if parts["irregular"] is None:
        raise IsomlabError("this subcommand needs an irregular system ('u' and 'A')")
    return parts["irregular"]


def _need_fuchsian(parts):
    if parts["fuchsian"] is None:
        raise IsomlabError("this subcommand needs a 'fuchsian' block")
    return parts["fuchsian"]


def cmd_formal(args) -> int:
    sys_ = _need_irregular(io.load_system(args.system))
    du = None
    if args.mode == "isomonodromic":
        from .formal import flow_derivative_oracle

        def flow_step(j, delta):
            target = sys_.u.copy()
            target[j] += delta
            res = integrate_flow(
                DeformationState(u=sys_.u, A=sys_.A),
                UPath.line(sys_.u, target),
                tol=args.tol,
            )
            return res.state.A

        du = flow_derivative_oracle(sys_, flow_step, K=args.order)
    fs = compute_formal_coefficients(sys_, K=args.order, mode=args.mode, du=du)
    report = {
        "command": "formal",
        "order": args.order,
        "mode": args.mode,
        "B": io.cvec_to_json(fs.b),
        "F": [io.cmat_to_json(F) for F in fs.F],
        "resonances": check_resonances(sys_.A, tol=args.mtol),
    }
    _emit(report)
    return 0


def cmd_stokes_rays(args) -> int:
    sys_ = _need_irregular(io.load_system(args.system))
    rayset = geometry.stokes_ray_directions(sys_.u)
    report = {
        "command": "stokes-rays",
        "directions": [
            {"pair": [ray.i, ray.j], "theta": ray.theta} for ray in rayset.rays
        ],
    }
    if _csv_dir(args):
        geometry.rays_to_csv(rayset, os.path.join(args.csv, "stokes_rays.csv"))
        report["csv"] = os.path.join(args.csv, "stokes_rays.csv")
    _emit(report)
    return 0


def cmd_cells(args) -> int:
    sys_ = _need_irregular(io.load_system(args.system))
    points = [sys_.u]
    if args.path:
        points = list(io.load_upath(args.path).waypoints)
    reports = []
    for pt in points:
        rep = geometry.classify_point(pt, args.tau, tol=args.mtol)
        reports.append(
            {
                "u": io.cvec_to_json(rep.u),
                "in_delta": rep.in_delta,
                "in_crossing": rep.in_crossing,
                "min_pair_gap": rep.min_pair_gap,
                "delta_pairs": [list(p) for p in rep.delta_pairs],
                "crossing_pairs": [list(p) for p in rep.crossing_pairs],
            }
        )
    out = {"command": "cells", "tau": args.tau, "points": reports}
    if len(points) == 2:
        hits = geometry.wall_hits(points[0], points[1], args.tau, tol=args.mtol)
        out["same_cell"] = not hits
        if _csv_dir(args):
            path = os.path.join(args.csv, "wall_hits.csv")
            geometry.wall_hits_to_csv(hits, path)
            out["csv"] = path
    _emit(out)
    return 0


def cmd_levelt(args) -> int:
    sys_ = _need_irregular(io.load_system(args.system))
    ld = compute_levelt_exponents(sys_.A, tol=args.mtol)
    ld = build_levelt_solution(
        sys_.A,
        lambda m: sys_.Lambda if m == 0 else np.zeros_like(sys_.A),
        ld=ld,
        K=max(args.order, 1),
    )
    report = {
        "command": "levelt",
        "D": [int(x) for x in ld.d],
        "Sigma": io.cvec_to_json(ld.sigma),
        "N": io.cmat_to_json(ld.N),
        "L": io.cmat_to_json(ld.L),
        "G": io.cmat_to_json(ld.G),
        "residual": ld.residual,
        "resonant_orders": list(ld.resonant_orders),
        "monodromy_exponential": io.cmat_to_json(monodromy_exponential(ld)),
    }
    _emit(report)
    return 0


def cmd_stokes_matrix(args) -> int:
    sys_ = _need_irregular(io.load_system(args.system))
    cfg = StokesConfig(tau=args.tau, radius=args.radius, tol=args.tol, order=args.order)
    res = stokes_matrix(sys_, args.r, cfg)
    report = {
        "command": "stokes-matrix",
        "r": args.r,
        "tau": args.tau,
        "S": io.cmat_to_json(res.S),
        "zstar": [io.pair(res.zstar.z), res.zstar.arg],
        "diag_residual": res.diag_residual,
        "required_zero": [
            {"entry": list(pos), "magnitude": mag} for pos, mag in res.required_zero
        ],
        "error_estimate": res.error_estimate,
    }
    ok = res.diag_residual <= args.mtol and all(
        mag <= args.mtol for _, mag in res.required_zero
    )
    report["verdict"] = PASS if ok else FAIL
    _emit(report)
    return 0 if ok else 2


def cmd_flow(args) -> int:
    sys_ = _need_irregular(io.load_system(args.system))
    path = io.load_upath(args.path)
    state = DeformationState(u=path.waypoints[0], A=sys_.A)
    res = integrate_flow(state, path, tol=args.tol)
    spec0 = np.sort_complex(np.linalg.eigvals(sys_.A))
    spec1 = np.sort_complex(np.linalg.eigvals(res.state.A))
    diag_drift = float(np.max(np.abs(np.diag(res.state.A) - np.diag(sys_.A))))
    spec_drift = float(np.max(np.abs(spec1 - spec0)))
    report = {
        "command": "flow",
        "A_final": io.cmat_to_json(res.state.A),
        "u_final": io.cvec_to_json(res.state.u),
        "diag_drift": diag_drift,
        "spectrum_drift": spec_drift,
    }
    ok = diag_drift <= args.mtol and spec_drift <= args.mtol
    report["verdict"] = PASS if ok else FAIL
    _emit(report)
    return 0 if ok else 2


def cmd_schlesinger(args) -> int:
    fsys = _need_fuchsian(io.load_system(args.system))
    path = io.load_upath(args.path)
    final, trace = integrate_schlesinger(fsys, path, tol=args.tol)
    spec_drift = 0.0
    for A0, A1 in zip(fsys.residues, final.residues):
        s0 = np.sort_complex(np.linalg.eigvals(A0))
        s1 = np.sort_complex(np.linalg.eigvals(A1))
        spec_drift = max(spec_drift, float(np.max(np.abs(s1 - s0))))
    report = {
        "command": "schlesinger",
        "poles_final": io.cvec_to_json(final.poles),
        "residues_final": [io.cmat_to_json(A) for A in final.residues],
        "spectrum_drift": spec_drift,
        "residue_sum": float(np.max(np.abs(sum(final.residues)))),
    }
    if args.monodromy:
        M0 = fuchs_monodromy(fsys, tol=args.tol)
        M1 = fuchs_monodromy(final, tol=args.tol)
        drift = max(
            float(np.max(np.abs(a - b))) for a, b in zip(M0, M1)
        )
        report["monodromy_drift"] = drift
        ok = spec_drift <= args.mtol and drift <= args.mtol
    else:
        ok = spec_drift <= args.mtol
    report["verdict"] = PASS if ok else FAIL
    _emit(report)
    return 0 if ok else 2


def cmd_kv_example(args) -> int:
    kv = kv_family(args.h, args.u)
    report = {
        "command": "kv-example",
        "u": io.pair(kv.u),
        "h_coeffs": io.cvec_to_json(np.array(kv.h_coeffs)),
        "poles": io.cvec_to_json(kv.system.poles),
        "residues": [io.cmat_to_json(A) for A in kv.system.residues],
        "C1": io.cmat_to_json(kv.C1),
    }
    ok = True
    if args.check:
        rng = np.random.default_rng(20180814)
        worst = 0.0
        count = 0
        while count < 20:
            z = complex(rng.uniform(-4, 6), rng.uniform(-4, 4))
            if min(abs(z - p) for p in kv.system.poles) < 0.3:
                continue
            count += 1
            h = 1e-6
            dY = (kv.Y(z + h) - kv.Y(z - h)) / (2 * h)
            worst = max(
                worst, float(np.max(np.abs(dY - kv.system.coefficient(z) @ kv.Y(z))))
            )
        mons = fuchs_monodromy(kv.system, tol=args.tol)
        mon_err = max(
            float(np.max(np.abs(M - np.eye(2)))) for M in mons
        )
        sch = schlesinger_residual(kv.residues_at, kv.system.poles)
        report["checks"] = {
            "ode_residual_fd": worst,
            "monodromy_identity_error": mon_err,
            "schlesinger_residual": sch,
            "schlesinger_residual_above_threshold": bool(sch > 1e-2),
        }
        ok = worst < 1e-4 and mon_err <= 1e-8 and sch > 1e-2
        report["verdict"] = PASS if ok else FAIL
    _emit(report)
    return 0 if ok else 2


def cmd_verify_strong(args) -> int:
    sys_ = _need_irregular(io.load_system(args.system))
    path = io.load_upath(args.path)
    state = DeformationState(u=path.waypoints[0], A=sys_.A)
    data = collect_data(
        state,
        list(path.waypoints),
        r=args.r,
        tau=args.tau,
        tol=args.tol,
        order=args.order,
        with_extras=True,
    )
    drift = data_drift(data)
    rel = stokes_relation_check(data[0])
    ok = (
        max(drift["S_r"], drift["S_r1"], drift["C_r"]) <= args.mtol
        and drift["B"] <= args.mtol
        and drift["L_spectrum"] <= args.mtol
        and drift["D"] == 0.0
        and max(rel.values()) <= args.mtol
    )
    report = {
        "command": "verify-strong",
        "r": args.r,
        "tau": args.tau,
        "samples": [io.cvec_to_json(d.u) for d in data],
        "drift": drift,
        "relations": rel,
        "S_r": io.cmat_to_json(data[0].S_r),
        "S_r1": io.cmat_to_json(data[0].S_r1),
        "C_r": io.cmat_to_json(data[0].C_r),
        "verdict": PASS if ok else FAIL,
    }
    _emit(report)
    return 0 if ok else 2


def cmd_verify_coalescence(args) -> int:
    sys_ = _need_irregular(io.load_system(args.system))
    rep = verify_coalescence(
        sys_.A,
        sys_.u,
        tau=args.tau,
        eps=args.eps,
        r=args.r,
        tol=args.tol,
        order=args.order,
    )
    report = {
        "command": "verify-coalescence",
        "uC": io.cvec_to_json(rep.uC),
        "direction": io.cvec_to_json(rep.direction),
        "gaps": [float(g) for g in rep.gaps],
        "pairs": [list(p) for p in rep.pairs],
        "S_frozen": io.cmat_to_json(rep.S_frozen),
        "limit_errors": [float(x) for x in rep.limit_errors],
        "entry_fits": {
            f"{i},{j}": {"slope": f.slope, "passed": f.passed}
            for (i, j), f in rep.entry_fits.items()
        },
        "driven_entry_slopes": {
            f"{i},{j}": s for (i, j), s in rep.driven_entry_slopes.items()
        },
        "a_entry_slopes": {f"{i},{j}": s for (i, j), s in rep.a_entry_slopes.items()},
        "driven_limit_errors": [float(x) for x in rep.driven_limit_errors],
        "flow_vs_germ": rep.flow_vs_germ,
        "entry_floor": rep.entry_floor,
        "pattern_magnitude": rep.pattern_magnitude,
        "thresholds": rep.thresholds,
        "decay_ok": rep.decay_ok,
        "limit_ok": rep.limit_ok,
        "pattern_ok": rep.pattern_ok,
        "verdict": PASS if rep.verdict else FAIL,
    }
    if _csv_dir(args):
        path = os.path.join(args.csv, "coalescence_entries.csv")
        rep.to_csv(path)
        report["csv"] = path
    _emit(report)
    return 0 if rep.verdict else 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="isomlab",
        description="Numerical laboratory for isomonodromic deformations",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, system=True, path=False):
        if system:
            sp.add_argument("--system", required=True, help="system JSON file")
        if path:
            sp.add_argument("--path", required=True, help="u-path JSON file")
        sp.add_argument("--tol", type=float, default=1e-10, help="integration tolerance")
        sp.add_argument("--mtol", type=float, default=1e-6, help="matrix comparison tolerance")
        sp.add_argument("--order", type=int, default=10, help="series truncation order")
        sp.add_argument("--csv", default=None, help="directory for CSV tables")

    sp = sub.add_parser("formal", help="formal solution coefficients")
    common(sp)
    sp.add_argument("--mode", choices=["generic", "isomonodromic"], default="generic")
    sp.set_defaults(fn=cmd_formal)

    sp = sub.add_parser("stokes-rays", help="Stokes ray directions")
    common(sp)
    sp.set_defaults(fn=cmd_stokes_rays)

    sp = sub.add_parser("cells", help="wall membership / same-cell check")
    common(sp)
    sp.add_argument("--path", default=None, help="optional u-path of points to classify")
    sp.add_argument("--tau", type=float, required=True)
    sp.set_defaults(fn=cmd_cells)

    sp = sub.add_parser("levelt", help="Levelt exponents and solution")
    common(sp)
    sp.set_defaults(fn=cmd_levelt)

    sp = sub.add_parser("stokes-matrix", help="Stokes matrix S_r")
    common(sp)
    sp.add_argument("--r", type=int, default=0)
    sp.add_argument("--tau", type=float, required=True)
    sp.add_argument("--radius", type=float, default=20.0, help="seed radius")
    sp.set_defaults(fn=cmd_stokes_matrix, order=30)

    sp = sub.add_parser("flow", help="strong isomonodromy flow along a u-path")
    common(sp, path=True)
    sp.set_defaults(fn=cmd_flow)

    sp = sub.add_parser("schlesinger", help="Schlesinger flow along a pole path")
    common(sp, path=True)
    sp.add_argument("--monodromy", action="store_true", help="compare endpoint monodromy")
    sp.set_defaults(fn=cmd_schlesinger)

    sp = sub.add_parser("kv-example", help="the explicit non-Schlesinger family")
    common(sp, system=False)
    sp.add_argument("--h", type=float, nargs="+", default=[1.0],
                    help="polynomial coefficients of h (constant first)")
    sp.add_argument("--u", type=float, default=0.5)
    sp.add_argument("--check", action="store_true")
    sp.set_defaults(fn=cmd_kv_example)

    sp = sub.add_parser("verify-strong", help="essential-data constancy along a flow")
    common(sp, path=True)
    sp.add_argument("--r", type=int, default=0)
    sp.add_argument("--tau", type=float, required=True)
    sp.set_defaults(fn=cmd_verify_strong, order=30)

    sp = sub.add_parser("verify-coalescence", help="coalescence-limit pipeline")
    common(sp)
    sp.add_argument("--r", type=int, default=0)
    sp.add_argument("--tau", type=float, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.set_defaults(fn=cmd_verify_coalescence, order=30)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except IsomlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
