"""Command line front end.

Subcommands mirror the library layout: coefficient derivation, Besov norm
evaluation, the two solvers, data-family construction and certification, and
the experiment campaigns.  Field files are CSV when the path ends in ``.csv``
and packed binary otherwise.  Campaign subcommands write a report directory
(report.json, table.csv, plot.gp) and exit nonzero if any verdict failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import experiments
from .coefficients import derive_coefficients
from .eulerian import SolverConfig, h1_integral, solve
from .initial_data import (build_family, build_psi, builtin_profile,
                           certification_tables)
from .lagrangian import initial_state, lagrangian_solve, pullback_to_eulerian
from .littlewood_paley import (BesovIndex, besov_norm, block_norms,
                               build_filter_bank, lp_norm)
from .spectral import (Field, PeriodicGrid, field_from_binary, field_from_csv,
                       field_to_binary, field_to_csv)

BUILTIN_NAMES = ("zero", "smoke", "psi")
DEFAULT_LENGTH = 64.0 * math.pi
DEFAULT_POINTS = 2**12


def _load_field(init: str, length: float, n_points: int | None) -> Field:
    if init in BUILTIN_NAMES:
        grid = PeriodicGrid(length, n_points or DEFAULT_POINTS)
        return builtin_profile(init, grid)
    path = Path(init)
    if not path.exists():
        raise SystemExit(f"error: no field file {path} and not one of "
                         f"{'/'.join(BUILTIN_NAMES)}")
    if path.suffix == ".csv":
        return field_from_csv(path)
    return field_from_binary(path)


def _save_field(f: Field, path) -> None:
    path = Path(path)
    if path.parent != Path("."):
        path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".csv":
        field_to_csv(f, path)
    else:
        field_to_binary(f, path)


def _parse_besov_triple(text: str) -> BesovIndex:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected s,p,r (e.g. 2,2,2), got {text!r}")
    s, p, r = (float(v) for v in parts)
    return BesovIndex(s, p, math.inf if r <= 0 else r)


def _cmd_coeffs(args) -> int:
    params = derive_coefficients(args.omega)
    data = asdict(params)
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        width = max(len(k) for k in data)
        for key, val in data.items():
            print(f"{key:<{width}} = {val!r}")
    return 0


def _cmd_besov(args) -> int:
    f = _load_field(args.input, args.L, args.N)
    bank = build_filter_bank(f.grid)
    r = math.inf if args.r <= 0 else args.r
    idx = BesovIndex(args.s, args.p, r)
    weighted = block_norms(bank, f, idx)
    print(f"besov_norm,{besov_norm(bank, f, idx)!r}")
    print("j,weighted_block_norm")
    for j, val in zip(range(-1, bank.j_max + 1), weighted):
        print(f"{j},{float(val)!r}")
    return 0


def _write_norm_table(path, traj, bank, indices) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "l2", "linf", "h1_integral"]
                        + [f"besov_{i.s:g}_{i.p:g}_{i.r:g}" for i in indices])
        for i in range(len(traj.times)):
            f = traj.field_at(i)
            row = [float(traj.times[i]), lp_norm(f, 2.0),
                   lp_norm(f, math.inf), h1_integral(f)]
            row += [besov_norm(bank, f, idx) for idx in indices]
            writer.writerow([repr(float(v)) for v in row])


def _cmd_solve(args) -> int:
    params = derive_coefficients(args.omega)
    u0 = _load_field(args.init, args.L, args.N)
    steps = max(1, round(args.tend / args.dt))
    snap = args.snapshot_every or max(1, steps // 16)
    cfg = SolverConfig(dt=args.dt, t_end=args.tend, snapshot_every=snap)
    traj = solve(u0, params, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(len(traj.times)):
        f = traj.field_at(i)
        field_to_binary(f, out / f"snap_{i:04d}.bin")
        field_to_csv(f, out / f"snap_{i:04d}.csv")
    indices = args.besov or [BesovIndex(2.0, 2.0, 2.0)]
    bank = build_filter_bank(u0.grid)
    _write_norm_table(out / "norms.csv", traj, bank, indices)
    final = traj.final()
    print(f"integrated to t={traj.times[-1]:g} in {len(traj.times)} snapshots"
          f" -> {out}")
    print(f"final: l2={lp_norm(final, 2.0):.6e} linf="
          f"{lp_norm(final, math.inf):.6e}")
    return 0


def _cmd_lagrangian(args) -> int:
    params = derive_coefficients(args.omega)
    u0 = _load_field(args.init, args.L, args.N)
    dt = args.dt or args.tend / 64.0
    steps = max(1, round(args.tend / dt))
    snap = args.snapshot_every or max(1, steps // 8)
    cfg = SolverConfig(dt=dt, t_end=args.tend, snapshot_every=snap)
    traj = lagrangian_solve(initial_state(u0), params, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, state in enumerate(traj.states):
        with open(out / f"flow_{i:04d}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["xi", "y", "y_xi", "U", "U_xi"])
            for vals in zip(state.labels, state.y, state.y_xi,
                            state.U, state.U_xi):
                writer.writerow([repr(float(v)) for v in vals])
    print(f"integrated particle system to t={traj.times[-1]:g}, "
          f"{len(traj.states)} snapshots -> {out}")
    if not args.cross_check:
        return 0
    eul = solve(u0, params, SolverConfig(dt=dt, t_end=args.tend,
                                         snapshot_every=1))
    rows = []
    for i, t in enumerate(traj.times):
        j = eul.index_of_time(float(t))
        diff = pullback_to_eulerian(traj.states[i]).values - eul.states[j]
        rows.append((float(t), float(np.max(np.abs(diff)))))
    with open(out / "cross_check.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "linf_gap"])
        for t, gap in rows:
            writer.writerow([repr(t), repr(gap)])
    worst = max(gap for _, gap in rows)
    print(f"cross-check vs grid solver: max linf gap {worst:.3e}")
    return 0


def _auto_family_grid(length: float, n_points: int | None,
                      n_block: int | None) -> PeriodicGrid:
    if n_points is not None:
        return PeriodicGrid(length, n_points)
    if n_block is None:
        return PeriodicGrid(length, DEFAULT_POINTS)
    return experiments.grid_for_block(n_block, length)


def _cmd_data(args) -> int:
    if args.certify:
        ns = range(args.n_min, args.n_max + 1)
        grid = _auto_family_grid(args.L, args.N, args.n_max)
        bump = build_psi(grid)
        tables = certification_tables(bump, ns, args.s, args.p, args.r)
        lines = ["quantity,n,value"]
        for tb in tables:
            for n, val in zip(tb.ns, tb.values):
                lines.append(f"{tb.quantity},{int(n)},{float(val)!r}")
            lines.append(f"{tb.quantity}_top_half_min,,{tb.empirical_min!r}")
        text = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).parent.mkdir(parents=True, exist_ok=True)
            Path(args.out).write_text(text)
            print(f"wrote {len(lines) - 1} rows -> {args.out}")
        else:
            sys.stdout.write(text)
        return 0
    if args.family is None:
        raise SystemExit("error: pass --family or --certify")
    if args.family != "psi" and args.n is None:
        raise SystemExit("error: --n is required for the modulated families")
    if args.out is None:
        raise SystemExit("error: --out is required with --family")
    grid = _auto_family_grid(args.L, args.N, args.n)
    bump = build_psi(grid)
    if args.family == "psi":
        f = bump.field
    else:
        fam = build_family(bump, args.n, args.s)
        f = getattr(fam, args.family)
    _save_field(f, args.out)
    print(f"wrote {args.family} (n={args.n}, s={args.s:g}) on "
          f"N={grid.n_points}, L={grid.length:g} -> {args.out}")
    return 0


def _report_out(args, default_name: str) -> Path:
    return Path(args.out) if args.out else Path("reports") / default_name


def _finish_campaign(report, args, name: str) -> int:
    out = _report_out(args, name)
    experiments.write_report(report, out)
    for key, v in report.verdicts.items():
        tag = "PASS" if v.passed else "FAIL"
        print(f"[{tag}] {key}: value={v.value:.6g} ({v.tolerance})")
    print(f"report -> {out}")
    return 0 if report.all_passed() else 1


def _n_list(args) -> list[int]:
    return list(range(args.n_min, args.n_max + 1))


def _cmd_nonuniform_super(args) -> int:
    rep = experiments.run_nonuniform_supercritical(
        args.s, args.p, args.r, _n_list(args), omega=args.omega,
        length=args.L, steps=args.steps, dt=args.dt)
    return _finish_campaign(rep, args, "nonuniform-super")


def _cmd_nonuniform_critical(args) -> int:
    rep = experiments.run_nonuniform_critical(
        args.p, _n_list(args), omega=args.omega, length=args.L,
        steps=args.steps, dt=args.dt)
    return _finish_campaign(rep, args, "nonuniform-critical")


def _cmd_decomp_rates(args) -> int:
    rep = experiments.run_decomposition_rates(
        args.s, args.p, args.r, _n_list(args), omega=args.omega,
        length=args.L, steps=args.steps, dt=args.dt)
    return _finish_campaign(rep, args, "decomp-rates")


def _cmd_critical_expansion(args) -> int:
    rep = experiments.run_critical_expansion(
        args.p, _n_list(args), omega=args.omega, length=args.L,
        steps=args.steps, dt=args.dt)
    return _finish_campaign(rep, args, "critical-expansion")


def _cmd_continuity(args) -> int:
    rep = experiments.run_continuous_dependence(
        args.s, args.p, args.r, args.eps, args.tend, omega=args.omega,
        length=args.L, n_points=args.N or DEFAULT_POINTS, steps=args.steps,
        dt=args.dt)
    return _finish_campaign(rep, args, "continuity")


def _cmd_picard(args) -> int:
    u0 = _load_field(args.init, args.L, args.N)
    rep = experiments.run_picard_convergence(
        u0, args.omega, args.m_max, s=args.s, p=args.p, r=args.r,
        steps=args.steps, t_end=args.tend, dt=args.dt)
    return _finish_campaign(rep, args, "picard")


def _add_grid_flags(p, with_points: bool = True) -> None:
    p.add_argument("--L", type=float, default=DEFAULT_LENGTH,
                   help="domain length (default 64*pi; must be >= 64*pi "
                        "for the plateau bump)")
    if with_points:
        p.add_argument("--N", type=int, default=None,
                       help="grid points (default: sized automatically)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rchlab",
        description="Spectral laboratory for a rotating shallow-water "
                    "equation on the circle.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="derive model coefficients from the "
                                      "rotation parameter")
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_coeffs)

    p = sub.add_parser("besov", help="Besov norm and per-block spectrum of a "
                                     "field file")
    p.add_argument("--input", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--r", type=float, default=2.0,
                   help="summability exponent; nonpositive means infinity")
    _add_grid_flags(p)
    p.set_defaults(func=_cmd_besov)

    p = sub.add_parser("solve", help="integrate the full equation")
    p.add_argument("--omega", type=float, default=experiments.DEFAULT_OMEGA)
    p.add_argument("--init", required=True,
                   help=f"field file or builtin ({'/'.join(BUILTIN_NAMES)})")
    p.add_argument("--tend", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--snapshot-every", type=int, default=None)
    p.add_argument("--besov", type=_parse_besov_triple, action="append",
                   help="s,p,r triple for norms.csv; repeatable")
    _add_grid_flags(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("lagrangian", help="integrate the particle system")
    p.add_argument("--init", required=True)
    p.add_argument("--omega", type=float, default=experiments.DEFAULT_OMEGA)
    p.add_argument("--tend", type=float, required=True)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--out", default="reports/lagrangian")
    p.add_argument("--snapshot-every", type=int, default=None)
    p.add_argument("--cross-check", action="store_true",
                   help="compare the pulled-back flow against the grid solver")
    _add_grid_flags(p)
    p.set_defaults(func=_cmd_lagrangian)

    p = sub.add_parser("data", help="build or certify the dyadic data "
                                    "families")
    p.add_argument("--family", choices=["psi", "w0n", "v0n", "u0n", "z0n"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--r", type=float, default=2.0)
    p.add_argument("--out", default=None)
    p.add_argument("--certify", action="store_true",
                   help="emit the full norm-scaling table as CSV")
    p.add_argument("--n-min", type=int, default=5)
    p.add_argument("--n-max", type=int, default=11)
    _add_grid_flags(p)
    p.set_defaults(func=_cmd_data)

    campaign = argparse.ArgumentParser(add_help=False)
    campaign.add_argument("--omega", type=float,
                          default=experiments.DEFAULT_OMEGA)
    campaign.add_argument("--dt", type=float, default=None,
                          help="time step (default: horizon / steps)")
    campaign.add_argument("--steps", type=int, default=None)
    campaign.add_argument("--out", default=None,
                          help="report directory (default reports/<name>)")
    _add_grid_flags(campaign)

    sweep = argparse.ArgumentParser(add_help=False)
    sweep.add_argument("--n-min", type=int, default=5)
    sweep.add_argument("--n-max", type=int, default=9)

    p = sub.add_parser("nonuniform-super", parents=[campaign, sweep],
                       help="high/low frequency gap persistence, "
                            "supercritical indices")
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--r", type=float, default=2.0)
    p.set_defaults(func=_cmd_nonuniform_super)

    p = sub.add_parser("nonuniform-critical", parents=[campaign, sweep],
                       help="gap persistence on the critical index line")
    p.add_argument("--p", type=float, default=2.0)
    p.set_defaults(func=_cmd_nonuniform_critical)

    p = sub.add_parser("decomp-rates", parents=[campaign, sweep],
                       help="frozen-data decay, side-band boundedness and "
                            "first-order residual rates")
    p.add_argument("--s", type=float, default=2.5)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--r", type=float, default=2.0)
    p.set_defaults(func=_cmd_decomp_rates)

    p = sub.add_parser("critical-expansion", parents=[campaign, sweep],
                       help="first-order expansion control on the critical "
                            "line")
    p.add_argument("--p", type=float, default=2.0)
    p.set_defaults(func=_cmd_critical_expansion)

    p = sub.add_parser("continuity", parents=[campaign],
                       help="solution distance under vanishing data "
                            "perturbations")
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--r", type=float, default=2.0)
    p.add_argument("--eps", type=float, action="append", default=None)
    p.add_argument("--tend", type=float, default=None)
    p.set_defaults(func=_cmd_continuity)

    p = sub.add_parser("picard", parents=[campaign],
                       help="contraction of the frozen-coefficient iteration")
    p.add_argument("--init", default="smoke")
    p.add_argument("--m-max", type=int, default=8)
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--r", type=float, default=2.0)
    p.add_argument("--tend", type=float, default=None)
    p.set_defaults(func=_cmd_picard)

    args = parser.parse_args(argv)
    if getattr(args, "eps", None) is None and args.command == "continuity":
        args.eps = [1e-2, 1e-3, 1e-4]
    if getattr(args, "steps", None) is None and hasattr(args, "steps"):
        args.steps = 200 if args.command == "picard" else 48
        if args.command == "continuity":
            args.steps = 64
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
