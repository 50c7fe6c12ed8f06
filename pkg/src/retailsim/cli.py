"""Command-line front end: single runs, experiment presets, analysis.

Exit codes: 0 success, 2 configuration/input error (the message names the
offending field), 3 internal model bug surfaced by a replication.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone

from . import __version__
from .config import ScenarioConfig, apply_overrides, default_config, load_config
from .errors import ConfigError, ModelBug, StatsError
from .experiments import EXPERIMENT_PRESETS, run_replication, run_sweep
from .report import (
    analysis_report,
    read_results_csv,
    write_descriptives_csv,
    write_results_csv,
)

SEED_ENV_VAR = "RETAILSIM_SEED"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="retailsim",
        description="Retail department simulator and management-practice experiments",
    )
    parser.add_argument("--version", action="version", version=f"retailsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="scenario config JSON (defaults to the built-in scenario)")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="dotted-path config override, e.g. levers.empowerment=1 (repeatable)",
        )

    p_sim = sub.add_parser("simulate", help="run one replication")
    add_common(p_sim)

    p_exp = sub.add_parser("experiment", help="run a preset experiment sweep")
    p_exp.add_argument("name", choices=sorted(EXPERIMENT_PRESETS), help="preset name")
    add_common(p_exp)
    p_exp.add_argument("--reps", type=int, default=20, help="replications per level (default 20)")
    p_exp.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")

    p_stats = sub.add_parser("stats", help="analyze an existing results CSV")
    p_stats.add_argument("--results", required=True, help="results CSV with a level column")
    p_stats.add_argument(
        "--dependent-vars",
        default="transactions,overall_satisfaction,refund_satisfaction",
        help="comma-separated outcome columns to analyze",
    )
    p_stats.add_argument("--family-alpha", type=float, default=0.05)
    p_stats.add_argument("--out", default=".", help="output directory (default: current)")
    return parser


def _resolve_config(args) -> tuple[ScenarioConfig, str]:
    cfg = load_config(args.config) if args.config else default_config()
    overrides = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError("--set", f"expected KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    seed_source = "config"
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
        seed_source = "flag"
    elif os.environ.get(SEED_ENV_VAR):
        try:
            env_seed = int(os.environ[SEED_ENV_VAR])
        except ValueError:
            raise ConfigError(SEED_ENV_VAR, f"not an integer: {os.environ[SEED_ENV_VAR]!r}") from None
        cfg = replace(cfg, master_seed=env_seed)
        seed_source = "env"
    cfg.validate()
    return cfg, seed_source


def _write_manifest(out_dir: str, command: str, cfg: ScenarioConfig | None, seed_source: str, outputs: list[str]) -> str:
    manifest = {
        "tool": "retailsim",
        "version": __version__,
        "command": command,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "master_seed": None if cfg is None else cfg.master_seed,
        "seed_source": seed_source,
        "config_digest": None if cfg is None else cfg.digest(),
        "outputs": outputs,
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _cmd_simulate(args) -> int:
    cfg, seed_source = _resolve_config(args)
    os.makedirs(args.out, exist_ok=True)
    result = run_replication(cfg, rep_index=0, level="single")
    results_path = os.path.join(args.out, "results.csv")
    write_results_csv(results_path, [result])
    _write_manifest(args.out, "simulate", cfg, seed_source, [results_path])
    out = result.outcome
    print(
        f"replication done: {out.transactions} transactions, "
        f"overall satisfaction {out.overall_satisfaction:.1f}, "
        f"refund satisfaction {out.refund_satisfaction:.1f}"
    )
    print(f"wrote {results_path}")
    return 0


def _cmd_experiment(args) -> int:
    cfg, seed_source = _resolve_config(args)
    preset = EXPERIMENT_PRESETS[args.name]
    spec = preset.build_spec(cfg, replications=args.reps)
    os.makedirs(args.out, exist_ok=True)
    results = run_sweep(spec, jobs=args.jobs)
    results_path = os.path.join(args.out, "results.csv")
    descriptives_path = os.path.join(args.out, "descriptives.csv")
    anova_path = os.path.join(args.out, "anova.txt")
    write_results_csv(results_path, results)
    write_descriptives_csv(descriptives_path, results)
    rows = read_results_csv(results_path)
    report = analysis_report(rows, list(preset.dependent_vars))
    with open(anova_path, "w", encoding="utf-8") as fh:
        fh.write(report)
        fh.write("\n")
    _write_manifest(
        args.out,
        f"experiment {args.name}",
        spec.base,
        seed_source,
        [results_path, descriptives_path, anova_path],
    )
    print(f"{len(results)} replications across {len(spec.levels)} levels")
    print(f"wrote {results_path}, {descriptives_path}, {anova_path}")
    return 0


def _cmd_stats(args) -> int:
    rows = read_results_csv(args.results)
    dependent_vars = [v.strip() for v in args.dependent_vars.split(",") if v.strip()]
    if not dependent_vars:
        raise ConfigError("dependent-vars", "no dependent variables given")
    if not 0.0 < args.family_alpha < 1.0:
        raise ConfigError("family-alpha", f"must be in (0, 1), got {args.family_alpha}")
    report = analysis_report(rows, dependent_vars, family_alpha=args.family_alpha)
    os.makedirs(args.out, exist_ok=True)
    anova_path = os.path.join(args.out, "anova.txt")
    with open(anova_path, "w", encoding="utf-8") as fh:
        fh.write(report)
        fh.write("\n")
    _write_manifest(args.out, "stats", None, "n/a", [anova_path])
    print(report)
    print(f"wrote {anova_path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        return _cmd_stats(args)
    except (ConfigError, StatsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ModelBug as exc:
        print(f"model bug: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
