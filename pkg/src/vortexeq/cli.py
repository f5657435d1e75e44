"""Command-line interface.

Subcommands: solve, sweep, profile, mc, compare. Every command writes its
outputs plus a manifest.json recording parameters, seeds, tolerances and
output digests; re-running with the same parameters reproduces the numeric
outputs bit-identically (Monte Carlo included, via the recorded seed).

Exit codes: 0 success, 1 usage error, 2 domain failure (unreachable z,
non-convergence, mismatched parameter mapping, failed comparison).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .configfile import get_float, get_int, load_config
from .liouville import BlowUpError, ToleranceFailureError
from .manifest import utcnow, write_manifest
from .mc import (
    CoincidentPointsError,
    McConfig,
    McObservables,
    MismatchedParametersError,
    compare_to_meanfield,
    make_lattice_ensemble,
    metropolis_run,
)
from .model import InvalidParametersError, ModelParams, mu_prime_from_mu, params_from_mapping, validate
from .selfconsistent import NoBracketError, UnreachableError, solve_state
from .svgplot import line_plot
from .sweep import EmptySweepError, run_sweep
from .thermo import THERMO_CSV_HEADER, compute_point, density_profile

USAGE_EXIT = 1
DOMAIN_EXIT = 2

_DOMAIN_ERRORS = (
    UnreachableError,
    NoBracketError,
    BlowUpError,
    ToleranceFailureError,
    EmptySweepError,
    MismatchedParametersError,
    CoincidentPointsError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _out_base() -> Path:
    return Path(os.environ.get("VORTEXEQ_OUTDIR", "."))


def _resolve_out(arg: str | None, default_name: str) -> Path:
    if arg is not None:
        return Path(arg)
    return _out_base() / default_name


_PARAM_FLAGS = {
    "lambda_total": "lam",
    "epsilon": "epsilon",
    "gamma": "gamma",
    "alpha": "alpha",
    "radius": "radius",
    "mu": "mu",
}


def _load_params(args) -> ModelParams:
    cfg = load_config(args.config) if getattr(args, "config", None) else {}
    params = params_from_mapping(cfg)
    overrides = {
        field: getattr(args, attr)
        for field, attr in _PARAM_FLAGS.items()
        if getattr(args, attr, None) is not None
    }
    if overrides:
        params = validate(ModelParams(**{**params.__dict__, **overrides}))
    return params


def _add_param_flags(parser) -> None:
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--lam", type=float, help="total circulation (default 1)")
    parser.add_argument("--epsilon", type=float, help="coupling constant (default 1)")
    parser.add_argument("--gamma", type=float, help="per-filament circulation (default 1)")
    parser.add_argument("--alpha", type=float, help="core elasticity constant (default 1)")
    parser.add_argument("--radius", type=float, help="confinement radius (default 1)")


def cmd_solve(args) -> int:
    params = _load_params(args)
    state = solve_state(args.mu, args.z, tol=args.tol)
    point = compute_point(state, params)
    out = _resolve_out(args.out, f"solve-mu{args.mu:g}-z{args.z:g}.{args.format}")
    out.parent.mkdir(parents=True, exist_ok=True)
    started = utcnow()
    if args.format == "json":
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(point.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write("# vortexeq-csv v1 thermo\n")
            fh.write(THERMO_CSV_HEADER + "\n")
            fh.write(point.to_csv_row() + "\n")
    write_manifest(
        out.parent,
        command=sys.argv,
        parameters={"mu": args.mu, "z": args.z, **params.__dict__},
        tolerances={"tol": args.tol},
        seeds=[],
        outputs=[out],
        started=started,
    )
    print(f"wrote {out}")
    return 0


def cmd_sweep(args) -> int:
    params = _load_params(args)
    started = utcnow()
    table = run_sweep(
        args.mu, args.z_min, args.z_max, args.n, params,
        tol=args.tol, workers=args.workers,
    )
    out = _resolve_out(args.out, f"sweep-mu{args.mu:g}.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(out)
    outputs = [out]
    if args.plot:
        z = table.z_grid
        series = {
            "E": np.array([p.energy if p else np.nan for p in table.points]),
            "T": np.array([p.temperature if p else np.nan for p in table.points]),
            "rho0": np.array([p.rho0 if p else np.nan for p in table.points]),
        }
        for name, values in series.items():
            svg = out.with_name(out.stem + f"-{name}.svg")
            line_plot(svg, z, values, f"{name}(z) at mu={args.mu:g}", "z", name)
            outputs.append(svg)
    write_manifest(
        out.parent,
        command=sys.argv,
        parameters={
            "mu": args.mu, "z_min": args.z_min, "z_max": args.z_max,
            "n": args.n, **params.__dict__,
        },
        tolerances={"tol": args.tol},
        seeds=[],
        outputs=outputs,
        started=started,
    )
    if table.metastable_intervals:
        spans = ", ".join(f"[{a:g},{b:g}]" for a, b in table.metastable_intervals)
        print(f"metastable: {spans}")
    else:
        print("metastable: none")
    print(f"wrote {out}")
    return 0


def cmd_profile(args) -> int:
    params = _load_params(args)
    state = solve_state(args.mu, args.z, tol=args.tol)
    r, rho = density_profile(state, params, args.samples)
    out = _resolve_out(args.out, f"profile-mu{args.mu:g}-z{args.z:g}.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    started = utcnow()
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write("# vortexeq-csv v1 density-profile\n")
        fh.write("r,rho\n")
        for ri, di in zip(r, rho):
            fh.write(f"{float(ri)!r},{float(di)!r}\n")
    write_manifest(
        out.parent,
        command=sys.argv,
        parameters={"mu": args.mu, "z": args.z, "samples": args.samples, **params.__dict__},
        tolerances={"tol": args.tol},
        seeds=[],
        outputs=[out],
        started=started,
    )
    print(f"wrote {out}")
    return 0


def cmd_mc(args) -> int:
    cfg = load_config(args.config)
    params = params_from_mapping(cfg)
    n_filaments = get_int(cfg, "n_filaments", 32)
    n_points = get_int(cfg, "points_per_filament", 16)
    period = get_float(cfg, "period", 1.0)
    mu_prime = get_float(cfg, "mu_prime", mu_prime_from_mu(params.mu, params))
    initial_msr = get_float(cfg, "initial_mean_square_radius", params.radius**2 / 2.0)
    mc_config = McConfig(
        beta_s=float(cfg["beta_s"]),
        sweeps=get_int(cfg, "sweeps", 20000),
        burn_in=get_int(cfg, "burn_in", 5000),
        step_point=get_float(cfg, "step_point", 0.1),
        step_translate=get_float(cfg, "step_translate", 1.0),
        seed=get_int(cfg, "seed", 0),
        histogram_bins=get_int(cfg, "histogram_bins", 90),
        histogram_rmax=get_float(cfg, "histogram_rmax", 1.5 * params.radius),
    )
    ensemble = make_lattice_ensemble(n_filaments, n_points, period, params, mu_prime, initial_msr)
    started = utcnow()
    obs = metropolis_run(ensemble, mc_config)

    out_dir = Path(args.out_dir) if args.out_dir else _out_base() / "mc-run"
    out_dir.mkdir(parents=True, exist_ok=True)
    hist_path = out_dir / "histogram.csv"
    trace_path = out_dir / "trace.csv"
    summary_path = out_dir / "summary.json"
    _write_histogram(hist_path, obs)
    _write_trace(trace_path, obs)
    summary = obs.summary_dict()
    summary["histogram_csv"] = hist_path.name
    summary["trace_csv"] = trace_path.name
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(
        out_dir,
        command=sys.argv,
        parameters={**params.__dict__, "n_filaments": n_filaments,
                    "points_per_filament": n_points, "period": period,
                    "mu_prime": mu_prime, "beta_s": mc_config.beta_s,
                    "sweeps": mc_config.sweeps, "burn_in": mc_config.burn_in,
                    "step_point": mc_config.step_point,
                    "step_translate": mc_config.step_translate},
        tolerances={},
        seeds=[mc_config.seed],
        outputs=[hist_path, trace_path, summary_path],
        started=started,
    )
    print(f"acceptance: points {obs.acceptance_points:.3f}, "
          f"translations {obs.acceptance_translations:.3f}")
    print(f"trace digest: {obs.trace_digest()}")
    print(f"wrote {out_dir}")
    return 0


def _write_histogram(path, obs: McObservables) -> None:
    total = float(obs.histogram_counts.sum() + obs.histogram_overflow)
    edges = obs.histogram_edges
    width = edges[1] - edges[0]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# vortexeq-csv v1 mc-histogram\n")
        fh.write("bin_left,bin_right,count,density\n")
        for lo, hi, c in zip(edges[:-1], edges[1:], obs.histogram_counts):
            fh.write(f"{float(lo)!r},{float(hi)!r},{int(c)},{float(c / (total * width))!r}\n")


def _write_trace(path, obs: McObservables) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# vortexeq-csv v1 mc-trace\n")
        fh.write("sweep,K,A,U,total\n")
        for s, row in enumerate(obs.energy_trace):
            fh.write(
                f"{s},{float(row[0])!r},{float(row[1])!r},"
                f"{float(row[2])!r},{float(row[3])!r}\n"
            )


def cmd_compare(args) -> int:
    with open(args.mc_summary, "r", encoding="utf-8") as fh:
        summary = json.load(fh)
    params = validate(ModelParams(**{**summary["params"], "mu": args.mu}))
    hist_path = Path(args.mc_summary).parent / summary["histogram_csv"]
    edges_lo, edges_hi, counts = [], [], []
    with open(hist_path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("bin_left"):
                continue
            lo, hi, count, _ = line.strip().split(",")
            edges_lo.append(float(lo))
            edges_hi.append(float(hi))
            counts.append(float(count))
    obs = _observables_from_summary(summary, np.array(edges_lo + [edges_hi[-1]]), np.array(counts), params)
    state = solve_state(args.mu, args.z, tol=args.tol)
    result = compare_to_meanfield(obs, state, params)
    ok = (
        result.l1_distance <= args.l1_tol
        and abs(result.second_moment_ratio - 1.0) <= args.moment_band
    )
    print(f"L1 distance: {result.l1_distance:.4f} (tolerance {args.l1_tol:g})")
    print(f"second moment ratio: {result.second_moment_ratio:.4f} "
          f"(band 1 +- {args.moment_band:g})")
    print(f"fraction beyond R: {result.fraction_beyond_radius:.4f}")
    print(f"comparison: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else DOMAIN_EXIT


def _observables_from_summary(summary, edges, counts, params) -> McObservables:
    config = McConfig(
        beta_s=summary["beta_s"],
        sweeps=summary["sweeps"],
        burn_in=summary["burn_in"],
        step_point=summary["step_point"],
        step_translate=summary["step_translate"],
        seed=summary["seed"],
        histogram_bins=len(counts),
        histogram_rmax=float(edges[-1]),
    )
    return McObservables(
        config=config,
        n_filaments=summary["n_filaments"],
        n_points=summary["n_points"],
        period=summary["period"],
        mu_prime=summary["mu_prime"],
        params=params,
        acceptance_rate=summary["acceptance_rate"],
        acceptance_points=summary["acceptance_points"],
        acceptance_translations=summary["acceptance_translations"],
        energy_trace=np.zeros((0, 4)),
        msr_trace=np.zeros(0),
        histogram_counts=counts,
        histogram_edges=edges,
        histogram_overflow=summary["histogram_overflow"],
        retained_sweeps=summary["retained_sweeps"],
        mean_square_radius=summary["mean_square_radius"],
        mean_square_radius_se=summary["mean_square_radius_se"],
        kinetic_per_filament=summary["kinetic_per_filament"],
        kinetic_per_filament_se=summary["kinetic_per_filament_se"],
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="vortexeq", description=__doc__)
    parser.add_argument("--version", action="version", version=f"vortexeq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one (mu, z) state and write a thermo row")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", help="output file (default from VORTEXEQ_OUTDIR)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_param_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="thermodynamic curves over a z grid at fixed mu")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--z-min", type=float, required=True)
    p.add_argument("--z-max", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--plot", action="store_true", help="also write SVG line plots")
    p.add_argument("--out")
    _add_param_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("profile", help="density profile rho(r) on [0, R]")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out")
    _add_param_flags(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("mc", help="Metropolis run of the discrete filament system")
    p.add_argument("--config", required=True, help="key=value config file")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("compare", help="compare an MC run against a mean-field state")
    p.add_argument("--mc-summary", required=True, help="summary.json of a finished mc run")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--l1-tol", type=float, default=0.15)
    p.add_argument("--moment-band", type=float, default=0.15)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN_EXIT
    except (InvalidParametersError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except KeyError as exc:
        print(f"usage error: missing key {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
