#!/usr/bin/env python3
"""Criterion 2(d)/(e) rehearsal: Exp2 ANOVA on expert util and transactions
across 5 independent master seeds; also prints per-rep max knowledge points
at the development thresholds 0.8/1.0."""

import sys
from dataclasses import replace

from retailsim.config import default_config
from retailsim.experiments import EXPERIMENT_PRESETS, run_sweep
from retailsim.stats import GroupSamples, anova_oneway

SEEDS = [42, 1001, 2002, 3003, 4004]


def anova_for(results, field):
    by_level = {}
    for r in results:
        by_level.setdefault(r.level, []).append(getattr(r.outcome, field))
    labels = sorted(by_level)
    return anova_oneway(GroupSamples.from_lists(labels, [by_level[lv] for lv in labels]))


def main(reps=20, jobs=2):
    print("== learning sweep null-effect rehearsal ==")
    for seed in SEEDS:
        base = replace(default_config(), master_seed=seed)
        spec = EXPERIMENT_PRESETS["learning"].build_spec(base, replications=reps)
        results = run_sweep(spec, jobs=jobs)
        res_e = anova_for(results, "expert_utilization")
        res_t = anova_for(results, "transactions")
        print(
            f"seed {seed}: expert_util F({res_e.df_between},{res_e.df_within})={res_e.f:.2f} p={res_e.p:.3f} | "
            f"transactions F={res_t.f:.2f} p={res_t.p:.3f}"
        )
        sys.stdout.flush()

    print("== development max points at high thresholds (seed 42) ==")
    spec = EXPERIMENT_PRESETS["development"].build_spec(default_config(), replications=reps)
    results = run_sweep(spec, jobs=jobs)
    for level in (0.8, 1.0):
        rows = [r for r in results if r.level == level]
        maxima = [r.outcome.max_normal_expertise for r in rows]
        promos = [r.outcome.promotions for r in rows]
        remaining = [r.outcome.normal_sellers_remaining for r in rows]
        print(
            f"threshold {level}: max points per rep min/mean/max = "
            f"{min(maxima)}/{sum(maxima)/len(maxima):.1f}/{max(maxima)}, "
            f"promotions={sorted(set(promos))}, remaining={sorted(set(remaining))}"
        )
    for level in (0.0, 0.2, 0.4, 0.6):
        rows = [r for r in results if r.level == level]
        promos = sorted({r.outcome.promotions for r in rows})
        remaining = sorted({r.outcome.normal_sellers_remaining for r in rows})
        print(f"threshold {level}: promotions={promos}, remaining={remaining}")


if __name__ == "__main__":
    main()
