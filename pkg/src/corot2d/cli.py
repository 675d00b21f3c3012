"""Command-line entry points.

    corot2d run             advance a configured run, write diag.csv + manifest
    corot2d mms             manufactured-solution convergence tables
    corot2d galerkin        truncation-refinement ladder
    corot2d bglab           logarithmic-inequality ensemble lab
    corot2d blowup-compare  eps = 0 vs diffusive run from identical data

Exit codes: 0 success, 2 configuration error, 3 blow-up abort (manifest
still written; blowup-compare treats a blow-up as data and exits 0).
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

from . import __version__, mms, output, plots, stepping, studies
from .config import ConfigError, config_dict, load_config, parse_config
from .fields import project_state
from .randfields import random_state
from .stepping import STEPPER_ID, SimConfig


def _add_common(p: argparse.ArgumentParser, default_out: str) -> None:
    p.add_argument("--config", type=Path, help="key = value config file")
    p.add_argument("--out", type=Path, default=Path(default_out), help="output directory")
    p.add_argument("--seed", type=int, help="64-bit reproducibility seed")
    p.add_argument("--n", type=int, help="grid points per direction")
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--t-final", dest="t_final", type=float, help="final time")
    p.add_argument("--epsilon", type=float, help="regularization strength")
    p.add_argument("--regime", choices=("none", "timederiv", "diffusive"))
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")


def _build_config(args, require_regime: bool = True) -> SimConfig:
    overrides = {
        "seed": args.seed, "n": args.n, "dt": args.dt, "t_final": args.t_final,
        "epsilon": args.epsilon, "regime": args.regime,
    }
    if args.config is not None:
        return load_config(args.config, overrides)
    if overrides.get("regime") is None and not require_regime:
        overrides["regime"] = "none"
    return parse_config("", overrides)


def _write_rows_csv(path: Path, rows: list[dict]) -> None:
    keys = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _cmd_run(args) -> int:
    cfg = _build_config(args)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    grid = cfg.grid()
    started = time.time()
    if cfg.forcing:
        forced = mms.Manufactured(grid, cfg.reg, cfg.amp_v, cfg.amp_s)
        initial, forcing = forced.exact_state(0.0), forced.forcing
    else:
        initial = project_state(grid, random_state(
            grid, cfg.seed, amp_v=cfg.amp_v, amp_s=cfg.amp_s,
            decay=cfg.decay, trace_free=cfg.trace_free), cfg.dealias)
        forcing = None
    try:
        traj = stepping.run(cfg, initial, forcing=forcing, grid=grid)
    except Exception as exc:  # surface the failure in the manifest, then re-raise
        output.write_manifest(out / "manifest.json", config_dict(cfg), STEPPER_ID,
                              __version__, cfg.seed, started, "error", error=str(exc))
        raise
    status, blowup_t = output.trajectory_status(traj)
    output.write_diag_csv(traj.rows, out / "diag.csv")
    output.write_manifest(out / "manifest.json", config_dict(cfg), STEPPER_ID,
                          __version__, cfg.seed, started, status, blowup_t=blowup_t)
    if cfg.snapshot_final and traj.final_state is not None:
        output.write_state_snapshots(out / "final", grid, traj.final_state)
    if not args.no_figures:
        plots.plot_run(output.read_diag_csv(out / "diag.csv"), out)
    print(f"status: {status}" + (f" at t = {blowup_t:g}" if blowup_t is not None else ""))
    return 3 if status == "blowup" else 0


def _cmd_mms(args) -> int:
    cfg = _build_config(args, require_regime=False)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    dts = (4 * cfg.dt, 2 * cfg.dt, cfg.dt)
    temporal = mms.temporal_ladder(cfg.reg, n=cfg.n1, dts=dts, t_final=cfg.t_final)
    spatial = mms.spatial_ladder(cfg.reg)
    _write_rows_csv(out / "mms_temporal.csv", temporal)
    _write_rows_csv(out / "mms_spatial.csv", spatial)
    if not args.no_figures:
        plots.plot_mms(spatial, temporal, out)
    for row in temporal:
        if "order" in row:
            print(f"dt = {row['dt']:g}: err = {row['err']:.3e}, observed order {row['order']:.3f}")
    return 0


def _cmd_galerkin(args) -> int:
    if args.regime is None:
        args.regime = "diffusive"
        if args.epsilon is None:
            args.epsilon = 0.1
    cfg = _build_config(args)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    sizes = tuple(int(s) for s in args.sizes.split(","))
    rows = studies.galerkin_ladder(cfg, sizes=sizes)
    _write_rows_csv(out / "galerkin.csv", [vars(r) for r in rows])
    if not args.no_figures:
        plots.plot_galerkin(rows, out)
    for r in rows:
        print(f"N = {r.n_coarse:3d} vs {r.n_fine:3d}: sup|dv| = {r.sup_diff_v:.3e}, "
              f"sup|dS| = {r.sup_diff_s:.3e}")
    return 0


def _cmd_bglab(args) -> int:
    cfg = _build_config(args, require_regime=False)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    report = studies.bg_lab(cfg.grid(), seed=cfg.seed, count=args.count, decay=cfg.decay)
    rows = [{"ensemble": "fit", "index": i, "ratio": r}
            for i, r in enumerate(report.fit_ratios)]
    rows += [{"ensemble": "holdout", "index": i, "ratio": r}
             for i, r in enumerate(report.holdout_ratios)]
    _write_rows_csv(out / "bglab.csv", rows)
    if not args.no_figures:
        plots.plot_bglab(report, out)
    print(f"fitted constant {report.fitted_constant:.6g}; holdout max "
          f"{report.holdout_max_ratio:.6g}; within margin: {report.holdout_within}; "
          f"split certificates ok: {report.certificates_ok}")
    return 0


def _cmd_blowup_compare(args) -> int:
    if args.epsilon is None:
        args.epsilon = 0.1
    if args.regime is None:
        args.regime = "diffusive"
    cfg = _build_config(args)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    res = studies.blowup_compare(cfg, cfg.reg.eps)
    for name, traj in (("unreg", res.unregularized), ("diffusive", res.regularized)):
        sub = out / name
        sub.mkdir(exist_ok=True)
        started = time.time()
        status, blowup_t = output.trajectory_status(traj)
        output.write_diag_csv(traj.rows, sub / "diag.csv")
        echo = config_dict(cfg)
        echo["regime"], echo["epsilon"] = (("none", 0.0) if name == "unreg"
                                           else (cfg.reg.kind, cfg.reg.eps))
        output.write_manifest(sub / "manifest.json", echo, STEPPER_ID, __version__,
                              cfg.seed, started, status, blowup_t=blowup_t)
    _write_rows_csv(out / "summary.csv", [{
        "eps": cfg.reg.eps,
        "d3s_growth_unreg": res.d3s_growth_unreg,
        "d3s_growth_reg": res.d3s_growth_reg,
        "unreg_status": res.unregularized.status,
        "reg_status": res.regularized.status,
    }])
    if not args.no_figures:
        plots.plot_blowup(output.read_diag_csv(out / "unreg" / "diag.csv"),
                          output.read_diag_csv(out / "diffusive" / "diag.csv"),
                          cfg.reg.eps, out)
    print(f"unregularized growth {res.d3s_growth_unreg:.3g} (status "
          f"{res.unregularized.status}); diffusive growth {res.d3s_growth_reg:.3g}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="corot2d", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="advance a configured run")
    _add_common(p, "corot2d-run")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("mms", help="manufactured-solution convergence")
    _add_common(p, "corot2d-mms")
    p.set_defaults(func=_cmd_mms)

    p = sub.add_parser("galerkin", help="truncation-refinement ladder")
    _add_common(p, "corot2d-galerkin")
    p.add_argument("--sizes", default="16,32,64", help="comma-separated coarse sizes")
    p.set_defaults(func=_cmd_galerkin)

    p = sub.add_parser("bglab", help="logarithmic-inequality ensemble lab")
    _add_common(p, "corot2d-bglab")
    p.add_argument("--count", type=int, default=100, help="fields per ensemble")
    p.set_defaults(func=_cmd_bglab)

    p = sub.add_parser("blowup-compare", help="eps = 0 vs diffusive contrast")
    _add_common(p, "corot2d-blowup")
    p.set_defaults(func=_cmd_blowup_compare)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
