#!/usr/bin/env python3
"""Calibration pilot: small sweeps across the three levers, direction checks."""

import argparse
import statistics
import sys
import time

from retailsim.config import default_config
from retailsim.experiments import EXPERIMENT_PRESETS, run_sweep

FIELDS = [
    "transactions",
    "overall_satisfaction",
    "refund_satisfaction",
    "mean_normal_expertise",
    "max_normal_expertise",
    "normal_utilization",
    "expert_utilization",
    "cashier_utilization",
    "renege_help",
    "renege_till",
    "renege_refund",
    "refunds_processed",
    "refunds_referred",
    "learning_episodes",
    "promotions",
    "normal_sellers_remaining",
]


def show(name, reps, jobs, seed, overrides):
    preset = EXPERIMENT_PRESETS[name]
    base = default_config()
    if seed is not None:
        from dataclasses import replace

        base = replace(base, master_seed=seed)
    if overrides:
        from retailsim.config import apply_overrides

        base = apply_overrides(base, overrides)
    spec = preset.build_spec(base, replications=reps)
    t0 = time.time()
    results = run_sweep(spec, jobs=jobs)
    dt = time.time() - t0
    print(f"== {name} ({reps} reps/level, {dt:.1f}s) ==")
    by_level = {}
    for r in results:
        by_level.setdefault(r.level, []).append(r.outcome)
    header = f"{'level':>8}"
    for f in FIELDS:
        header += f" {f[:14]:>14}"
    print(header)
    for level in sorted(by_level):
        outs = by_level[level]
        row = f"{level:>8g}"
        for f in FIELDS:
            vals = [getattr(o, f) for o in outs if getattr(o, f) is not None]
            if not vals:
                row += f" {'--':>14}"
            else:
                m = statistics.fmean(vals)
                row += f" {m:>14.2f}"
        print(row)
    print()
    return results


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("names", nargs="*", default=["empowerment", "learning", "development"])
    ap.add_argument("--reps", type=int, default=4)
    ap.add_argument("--jobs", type=int, default=2)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--set", dest="overrides", action="append", default=[])
    args = ap.parse_args()
    overrides = dict(item.split("=", 1) for item in args.overrides)
    names = args.names or ["empowerment", "learning", "development"]
    for name in names:
        show(name, args.reps, args.jobs, args.seed, overrides)
