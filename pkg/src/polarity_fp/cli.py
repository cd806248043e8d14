"""Command-line interface: simulate, stationary, sweep-alpha, phase.

Exit codes are scriptable: 0 for a completed run, 2 for a run that blew up,
1 for any error (bad config, solver failure, I/O).  The phase campaign fans
independent runs out to a process pool bounded by POLARITY_FP_WORKERS.
"""

from __future__ import annotations

import argparse
import datetime
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, parse_config_file
from .dynamics import ModelParams, SimOutcome, StepperConfig, simulate
from .errors import PolarityError
from .exchange import ExchangeState, exchange_simulate
from .grid import build_grid, mass, trace_gap, write_field_csv
from .outputs import RunManifest, digest_files, write_manifest, write_trajectory_csv
from .profiles import blended_profile, build_profile, exchange_split
from .stationary import enumerate_states, mass_of_alpha

__all__ = ["main"]

_CONFIG_HELP = """\
config file keys (flat "key = value" lines, '#' comments):
  model             direct | exchange
  profile           gaussian_stationary | asymmetric_stationary | step |
                    linear | custom_csv
  mass              total marker mass (for the exchange model this includes
                    the boundary masses); required except for custom_csv
  shift             tilt of asymmetric_stationary / slope of linear (default 0)
  width             step-profile width (default 0.3)
  steepness         step-profile smoothing scale (default 0.05)
  profile_csv       snapshot to load when profile = custom_csv
  n_cells           even mesh-cell count >= 4 (default 1000)
  dt                time step (default 1e-2)
  t_end             final time (default 4.0)
  record_every      diagnostics sampling stride (default 1)
  alpha_threshold   blow-up trace-gap trigger, or 'auto' = 1/dx (default)
  supnorm_threshold blow-up sup-norm trigger, or 'auto' = 10*M/dx (default)
  scheme            hybrid | exponential | central (default hybrid)
  alpha_refresh     one fixed-point refresh of the frozen drift (default false)
  snapshot_times    comma-separated times for profile snapshots
  mu_left, mu_right initial boundary masses (exchange; default c0(+-1))
  seed              recorded in the manifest (campaign reproducibility)
  out_dir           output directory (the --out flag overrides it)
All numeric values accept scientific notation."""


def _utcnow() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _build_run(cfg: RunConfig):
    """Grid, initial state, and stepper settings from a validated config."""
    grid = build_grid(cfg.n_cells)
    profile = build_profile(
        cfg.profile, grid,
        mass_value=cfg.mass, shift=cfg.shift,
        width=cfg.width, steepness=cfg.steepness,
        csv_path=cfg.profile_csv,
    )
    stepper = StepperConfig(
        dt=cfg.dt,
        t_end=cfg.t_end,
        blowup_alpha_threshold=cfg.alpha_threshold,
        blowup_supnorm_threshold=cfg.supnorm_threshold,
        record_every=cfg.record_every,
        scheme=cfg.scheme,
        alpha_refresh=cfg.alpha_refresh,
        snapshot_times=cfg.snapshot_times,
    )
    return grid, profile, stepper


def _run_model(cfg: RunConfig) -> SimOutcome:
    _, profile, stepper = _build_run(cfg)
    if cfg.model == "direct":
        return simulate(profile, ModelParams(), stepper)
    mu = None
    if cfg.mu_left is not None:
        mu = (cfg.mu_left, cfg.mu_right)
    total = cfg.mass if cfg.mass is not None else mass(profile)
    interior, mu = exchange_split(profile, total, mu)
    return exchange_simulate(ExchangeState(interior, *mu), stepper)


def _snapshot_name(t: float) -> str:
    return f"snapshot_t{t:g}.csv"


def cmd_simulate(args) -> int:
    try:
        cfg = parse_config_file(args.config)
    except PolarityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_dir = Path(args.out) if args.out else Path(cfg.out_dir)
    started = _utcnow()
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        outcome = _run_model(cfg)
    except (PolarityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    exchange = cfg.model == "exchange"
    produced = ["trajectory.csv"]
    write_trajectory_csv(outcome.trajectory, out_dir / "trajectory.csv", exchange)
    for t, field in outcome.snapshots or []:
        name = _snapshot_name(t)
        write_field_csv(field, out_dir / name)
        produced.append(name)
    write_field_csv(outcome.final_state, out_dir / "snapshot_final.csv")
    produced.append("snapshot_final.csv")

    manifest = RunManifest(
        config=cfg.to_dict(),
        code_version=__version__,
        started_utc=started,
        finished_utc=_utcnow(),
        status=outcome.status,
        files=digest_files(out_dir, produced),
        blowup_time=outcome.blowup_time,
        reason=outcome.reason,
    )
    write_manifest(manifest, out_dir / "run_manifest.json")

    print(f"status: {outcome.status}" +
          (f" (t = {outcome.blowup_time:g}, {outcome.reason})"
           if outcome.status == "blew_up" else ""))
    if outcome.status == "completed":
        return 0
    if outcome.status == "blew_up":
        return 2
    print(f"error: {outcome.reason}", file=sys.stderr)
    return 1


def cmd_stationary(args) -> int:
    if not args.mass > 0.0:
        print("error: mass must be positive", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    try:
        grid = build_grid(args.n_cells)
        states = enumerate_states(args.mass, args.model, grid)
        out_dir.mkdir(parents=True, exist_ok=True)
    except (PolarityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    names = []
    for i, st in enumerate(states, start=1):
        tag = "symmetric" if st.kind == "symmetric" else (
            "asymmetric_plus" if st.alpha > 0 else "asymmetric_minus")
        name = f"state_{i}_{tag}.csv"
        write_field_csv(st.field, out_dir / name)
        names.append(name)
    alphas = ", ".join(f"{st.alpha:.12g}" for st in states)
    print(f"{args.model} M={args.mass:g}: {len(states)} stationary state(s); "
          f"alpha = {alphas}")
    return 0


def cmd_sweep_alpha(args) -> int:
    if not (0.0 < args.alpha_min < args.alpha_max):
        print("error: need 0 < alpha-min < alpha-max", file=sys.stderr)
        return 1
    if args.points < 2:
        print("error: need at least 2 points", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        alphas = np.geomspace(args.alpha_min, args.alpha_max, args.points)
        path = out_dir / f"sweep_alpha_{args.model}.csv"
        with path.open("w", newline="") as fh:
            fh.write("alpha,M_alpha\n")
            for a in alphas:
                fh.write(f"{a:.17g},{mass_of_alpha(float(a), args.model):.17g}\n")
    except (PolarityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


def _phase_cell(cell) -> tuple[float, float, str, float, float]:
    """One phase-diagram run; returns (M, asym, outcome, final_alpha, blowup_t).

    Runs in a worker process; must only touch its arguments.
    """
    model, m, asym, n_cells, dt, t_end = cell
    grid = build_grid(n_cells)
    profile = blended_profile(m, asym, grid)
    stepper = StepperConfig(dt=dt, t_end=t_end)
    if model == "direct":
        outcome = simulate(profile, ModelParams(), stepper)
    else:
        interior, mu = exchange_split(profile, m)
        outcome = exchange_simulate(ExchangeState(interior, *mu), stepper)
    final_alpha = trace_gap(outcome.final_state)
    if outcome.status == "blew_up":
        return m, asym, "blew_up", final_alpha, outcome.blowup_time
    if outcome.status == "completed":
        label = "converged_symmetric" if abs(final_alpha) < 0.05 \
            else "converged_asymmetric"
        return m, asym, label, final_alpha, float("nan")
    return m, asym, "error", float("nan"), float("nan")


def cmd_phase(args) -> int:
    try:
        masses = [float(tok) for tok in args.masses.split(",") if tok.strip()]
        asyms = [float(tok) for tok in args.asym.split(",") if tok.strip()]
    except ValueError as exc:
        print(f"error: bad list: {exc}", file=sys.stderr)
        return 1
    if not masses or not asyms:
        print("error: masses and asym lists must be non-empty", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = [(args.model, m, a, args.n_cells, args.dt, args.t_end)
             for m in masses for a in asyms]
    workers = int(os.environ.get("POLARITY_FP_WORKERS", "0")) or None
    results = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(_phase_cell, cell): cell for cell in cells}
        for fut, cell in futures.items():
            try:
                results.append(fut.result())
            except Exception as exc:  # per-cell failure; campaign continues
                print(f"cell M={cell[1]} asym={cell[2]} failed: {exc}",
                      file=sys.stderr)
                results.append((cell[1], cell[2], "error",
                                float("nan"), float("nan")))
    results.sort(key=lambda r: (r[0], r[1]))
    path = out_dir / "phase.csv"
    with path.open("w", newline="") as fh:
        fh.write("M,asym,outcome,final_alpha,blowup_time\n")
        for m, a, outcome, alpha, bt in results:
            fh.write(f"{m:.17g},{a:.17g},{outcome},{alpha:.17g},{bt:.17g}\n")
    print(f"wrote {path} ({len(results)} cells)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarity-fp",
        description="Simulate the boundary-coupled Fokker-Planck cell-polarity "
                    "models, enumerate their stationary states, and sweep the "
                    "mass-vs-alpha curves.",
        epilog=_CONFIG_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one model from a config file",
                       epilog=_CONFIG_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", required=True, help="flat key=value config file")
    p.add_argument("--out", default=None, help="output directory (overrides config)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("stationary", help="enumerate stationary states at a mass")
    p.add_argument("--mass", type=float, required=True)
    p.add_argument("--model", choices=("direct", "exchange"), default="direct")
    p.add_argument("--n-cells", type=int, default=1000)
    p.add_argument("--out", default="stationary_output")
    p.set_defaults(func=cmd_stationary)

    p = sub.add_parser("sweep-alpha", help="emit the alpha -> M_alpha curve")
    p.add_argument("--model", choices=("direct", "exchange"), default="direct")
    p.add_argument("--alpha-min", type=float, default=1e-3)
    p.add_argument("--alpha-max", type=float, default=10.0)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", default="sweep_output")
    p.set_defaults(func=cmd_sweep_alpha)

    p = sub.add_parser("phase", help="run an (M, asymmetry) campaign")
    p.add_argument("--model", choices=("direct", "exchange"), default="direct")
    p.add_argument("--masses", required=True, help="comma-separated masses")
    p.add_argument("--asym", required=True,
                   help="comma-separated asymmetries in [0, 1]")
    p.add_argument("--n-cells", type=int, default=400)
    p.add_argument("--dt", type=float, default=1e-2)
    p.add_argument("--t-end", type=float, default=4.0)
    p.add_argument("--out", default="phase_output")
    p.set_defaults(func=cmd_phase)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
