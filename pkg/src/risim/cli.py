"""Command-line front end: simulate, sweep, figure, validate."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import (
    ConfigError, SweepSpec, SweepVariable, load_scenario, run_scenario,
    run_sweep, scenario_to_dict, validate, write_cdf_csv, write_metadata,
    write_sweep_csv, write_sweep_json,
)
from .figures import reproduce_figure


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="override the master seed")
    parser.add_argument("--trials", type=int, default=None,
                        help="override the trial count")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for trials (same results any count)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risim",
        description="Monte Carlo simulator for reflecting-surface assisted links")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one configured scenario")
    p_sim.add_argument("config", help="JSON scenario file")
    _add_common(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="sweep one variable of a scenario")
    p_sweep.add_argument("config", help="JSON scenario file")
    p_sweep.add_argument("--var", required=True,
                         choices=[v.value for v in SweepVariable])
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated sweep values")
    p_sweep.add_argument("--target-ris", type=int, default=0,
                         help="surface index the swept variable applies to")
    _add_common(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_fig = sub.add_parser("figure", help="reproduce a canned experiment")
    p_fig.add_argument("figure_id", metavar="figure", help="F2 .. F9")
    p_fig.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE", help="figure knob override")
    _add_common(p_fig)
    p_fig.set_defaults(func=_cmd_figure)

    p_val = sub.add_parser("validate", help="check a scenario file")
    p_val.add_argument("config", help="JSON scenario file")
    p_val.set_defaults(func=_cmd_validate)

    return parser


def _load_with_overrides(args) -> "ScenarioConfig":
    cfg = load_scenario(args.config)
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.trials is not None:
        cfg.n_trials = args.trials
    return cfg


def _cmd_simulate(args) -> int:
    cfg = _load_with_overrides(args)
    results = run_scenario(cfg, threads=args.threads)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    header = ("receiver,ergodic_rate_bps_hz,mean_snr_db,"
              "rate_ci_low,rate_ci_high,n_trials,seed")
    if args.format == "csv":
        lines = [header]
        for u, res in enumerate(results):
            lines.append(",".join([
                str(u), f"{res.ergodic_rate:.9g}", f"{res.mean_snr_db:.9g}",
                f"{res.rate_ci_low:.9g}", f"{res.rate_ci_high:.9g}",
                str(res.n_trials), str(res.seed)]))
        path = outdir / "metrics.csv"
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
    else:
        payload = [
            {
                "receiver": u,
                "ergodic_rate_bps_hz": res.ergodic_rate,
                "mean_snr_db": res.mean_snr_db,
                "snr_db_trial_mean": res.snr_db_trial_mean,
                "rate_ci_low": res.rate_ci_low,
                "rate_ci_high": res.rate_ci_high,
                "n_trials": res.n_trials,
                "seed": res.seed,
            }
            for u, res in enumerate(results)
        ]
        path = outdir / "metrics.json"
        path.write_text(json.dumps(payload, indent=1) + "\n")
        written.append(path)

    for u, res in enumerate(results):
        suffix = f"_rx{u}" if len(results) > 1 else ""
        written.append(write_cdf_csv(outdir / f"cdf{suffix}.csv", res.rate_samples))
    written.append(write_metadata(outdir / "metadata.json", cfg))

    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_with_overrides(args)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    spec = SweepSpec(variable=SweepVariable(args.var), values=values,
                     target_ris=args.target_ris)
    rows = run_sweep(cfg, spec, threads=args.threads)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    n_users = len(cfg.rx)
    written = []
    for u in range(n_users):
        suffix = f"_rx{u}" if n_users > 1 else ""
        per_rx = [(value, results[u]) for value, results in rows]
        name = f"sweep_{args.var}{suffix}.{args.format}"
        writer = write_sweep_csv if args.format == "csv" else write_sweep_json
        written.append(writer(outdir / name, per_rx))
    written.append(write_metadata(
        outdir / f"sweep_{args.var}_meta.json", cfg,
        {"sweep": {"variable": args.var, "values": values,
                   "target_ris": args.target_ris}}))
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_figure(args) -> int:
    overrides = {}
    for item in args.override:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    written = reproduce_figure(args.figure_id, overrides, out_dir=args.out,
                               fmt=args.format, threads=args.threads)
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_validate(args) -> int:
    cfg = load_scenario(args.config)
    issues = validate(cfg)
    if issues:
        print("invalid scenario:")
        for issue in issues:
            print(f"- {issue}")
        return 1
    print("ok")
    print(json.dumps(scenario_to_dict(cfg), indent=1))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
