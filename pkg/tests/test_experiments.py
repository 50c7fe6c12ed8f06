import dataclasses
import json

import pytest

from retailsim.config import ScenarioConfig, default_config
from retailsim.errors import ConfigError
from retailsim.experiments import (
    EXPERIMENT_PRESETS,
    SweepSpec,
    run_replication,
    run_sweep,
    summarize,
)


def small_base(**overrides):
    cfg = dataclasses.replace(default_config(), horizon_weeks=0.05, master_seed=11)
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def small_spec(levels=(0.0, 1.0), reps=2, lever="empowerment"):
    return SweepSpec(lever=lever, levels=levels, base=small_base(), replications=reps)


class TestRunReplication:
    def test_same_inputs_identical_results(self):
        cfg = small_base()
        a = run_replication(cfg, 3, level=0.5)
        b = run_replication(cfg, 3, level=0.5)
        assert a == b

    def test_different_rep_index_differs(self):
        cfg = small_base()
        a = run_replication(cfg, 0, level=0.5)
        b = run_replication(cfg, 1, level=0.5)
        assert a.seed != b.seed
        assert a.outcome != b.outcome

    def test_level_enters_seed_derivation(self):
        cfg = small_base()
        a = run_replication(cfg, 0, level=0.0)
        b = run_replication(cfg, 0, level=1.0)
        assert a.seed != b.seed


class TestSweep:
    def test_shape_and_order(self):
        spec = small_spec(levels=(0.0, 0.5, 1.0), reps=3)
        results = run_sweep(spec)
        assert len(results) == 9
        assert [(r.level, r.replication) for r in results] == [
            (lv, rep) for lv in (0.0, 0.5, 1.0) for rep in range(3)
        ]

    def test_ceteris_paribus_across_levels(self):
        """Serialized configs differ in the lever field alone."""
        spec = small_spec(levels=(0.0, 0.25, 1.0))
        dicts = [spec.config_for(lv).to_dict() for lv in spec.levels]
        for d, lv in zip(dicts, spec.levels):
            assert d["levers"]["empowerment"] == lv
            d["levers"]["empowerment"] = "LEVER"
        assert dicts[0] == dicts[1] == dicts[2]

    def test_parallel_equals_serial(self):
        spec = small_spec(levels=(0.0, 1.0), reps=3)
        serial = run_sweep(spec, jobs=1)
        parallel = run_sweep(spec, jobs=2)
        assert serial == parallel

    def test_df_bookkeeping(self):
        assert small_spec(levels=(0.0, 0.25, 0.5, 0.75, 1.0), reps=20).anova_df() == (4, 95)
        assert small_spec(levels=(0.0, 0.2, 0.4, 0.6, 0.8, 1.0), reps=20).anova_df() == (5, 114)
        assert small_spec(levels=(0.0, 0.25, 0.5, 0.75, 1.0), reps=5).anova_df() == (4, 20)

    def test_invalid_specs_rejected(self):
        with pytest.raises(ConfigError):
            SweepSpec("empowerment", (0.0, 0.0), small_base(), 2).validate()
        with pytest.raises(ConfigError):
            SweepSpec("empowerment", (0.0, 1.0), small_base(), 1).validate()
        with pytest.raises(ConfigError):
            SweepSpec("arrival_rate_per_hour", (0.0, 1.0), small_base(), 2).validate()


class TestSummarize:
    def test_single_result_reports_zero_sd(self):
        spec = small_spec(levels=(0.0,), reps=2)
        results = [run_replication(spec.config_for(0.0), 0, level=0.0)]
        table = summarize(results)
        mean, sd, n = table[0.0]["transactions"]
        assert n == 1
        assert sd == 0.0

    def test_constant_outcomes_zero_sd(self):
        spec = small_spec(levels=(0.5,), reps=2)
        r = run_replication(spec.config_for(0.5), 0, level=0.5)
        table = summarize([r, r])
        _, sd, n = table[0.5]["transactions"]
        assert n == 2
        assert sd == 0.0

    def test_absent_fields_stay_absent(self):
        base = small_base(horizon_weeks=0.2)
        staffing = dataclasses.replace(base.staffing, normal_sellers=0)
        cfg = dataclasses.replace(base, staffing=staffing)
        results = [run_replication(cfg, i, level=0.0) for i in range(2)]
        table = summarize(results)
        mean, sd, n = table[0.0]["normal_utilization"]
        assert (mean, sd, n) == (None, None, 0)


class TestPresets:
    def test_preset_catalog(self):
        assert set(EXPERIMENT_PRESETS) == {"empowerment", "learning", "development"}

    def test_empowerment_preset_shape(self):
        spec = EXPERIMENT_PRESETS["empowerment"].build_spec(default_config())
        assert spec.lever == "empowerment"
        assert spec.levels == (0.0, 0.25, 0.5, 0.75, 1.0)
        assert spec.replications == 20
        assert spec.anova_df() == (4, 95)
        assert spec.base.levers.competence_threshold == 1.0

    def test_development_preset_shape(self):
        spec = EXPERIMENT_PRESETS["development"].build_spec(default_config())
        assert spec.levels == (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
        assert spec.anova_df() == (5, 114)
        assert spec.base.levers.empower_to_learn == 1.0

    def test_presets_share_everything_but_their_lever(self):
        base = default_config()
        e = EXPERIMENT_PRESETS["empowerment"].build_spec(base).base.to_dict()
        l = EXPERIMENT_PRESETS["learning"].build_spec(base).base.to_dict()
        assert e == l
