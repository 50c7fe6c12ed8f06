"""Scenario sweeps: replication management and the three practice presets.

A sweep varies exactly one practice lever across its levels with every
other configuration field frozen; each (level, replication) cell gets its
own derived master seed, so results are reproducible one cell at a time
and identical whether the sweep runs serially or fanned out to worker
processes.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field, replace

from .config import ScenarioConfig, set_lever
from .engine import derive_replication_seed
from .errors import ConfigError
from .metrics import ReplicationOutcome
from .world import run_world

OUTCOME_FIELDS = ReplicationOutcome.field_names()


@dataclass(frozen=True)
class ReplicationResult:
    level: float
    replication: int
    seed: int
    outcome: ReplicationOutcome


@dataclass(frozen=True)
class SweepSpec:
    lever: str
    levels: tuple[float, ...]
    base: ScenarioConfig
    replications: int = 20

    def validate(self) -> None:
        if self.lever not in ("empowerment", "empower_to_learn", "competence_threshold"):
            raise ConfigError("sweep.lever", f"not a sweepable lever: {self.lever!r}")
        if len(self.levels) < 1:
            raise ConfigError("sweep.levels", "need at least one level")
        if len(set(self.levels)) != len(self.levels):
            raise ConfigError("sweep.levels", "levels must be distinct")
        if self.replications < 2:
            raise ConfigError("sweep.replications", f"need >= 2, got {self.replications}")
        self.base.validate()

    def config_for(self, level: float) -> ScenarioConfig:
        return set_lever(self.base, self.lever, level)

    def anova_df(self) -> tuple[int, int]:
        k = len(self.levels)
        return k - 1, k * (self.replications - 1)


def run_replication(cfg: ScenarioConfig, rep_index: int, level: object = "single") -> ReplicationResult:
    """One full deterministic run; the world is torn down on return."""
    seed = derive_replication_seed(cfg.master_seed, level, rep_index)
    outcome = run_world(cfg, master_seed=seed)
    level_value = float(level) if isinstance(level, (int, float)) else float("nan")
    return ReplicationResult(level=level_value, replication=rep_index, seed=seed, outcome=outcome)


def _run_cell(args: tuple) -> ReplicationResult:
    cfg, rep_index, level = args
    return run_replication(cfg, rep_index, level)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[ReplicationResult]:
    """All levels x replications, ordered by (level position, replication)."""
    spec.validate()
    cells = [
        (spec.config_for(level), rep, level)
        for level in spec.levels
        for rep in range(spec.replications)
    ]
    if jobs <= 1:
        return [_run_cell(cell) for cell in cells]
    import multiprocessing

    with multiprocessing.Pool(processes=jobs) as pool:
        return pool.map(_run_cell, cells, chunksize=1)


def summarize(results: list[ReplicationResult]) -> dict[float, dict[str, tuple]]:
    """Per-level (mean, sd, n) for every outcome field.

    With a single observation the sample SD is undefined; it is reported
    as 0.0 by convention and the n column makes the convention visible.
    A field is absent (None, None, 0) when no replication reported it,
    e.g. normal-staff measures after everyone was promoted.
    """
    by_level: dict[float, list[ReplicationOutcome]] = {}
    for r in results:
        by_level.setdefault(r.level, []).append(r.outcome)
    table: dict[float, dict[str, tuple]] = {}
    for level in sorted(by_level):
        row: dict[str, tuple] = {}
        for name in OUTCOME_FIELDS:
            values = [getattr(o, name) for o in by_level[level]]
            present = [float(v) for v in values if v is not None]
            if not present:
                row[name] = (None, None, 0)
            elif len(present) == 1:
                row[name] = (present[0], 0.0, 1)
            else:
                row[name] = (statistics.fmean(present), statistics.stdev(present), len(present))
        table[level] = row
    return table


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    lever: str
    levels: tuple[float, ...]
    dependent_vars: tuple[str, ...]
    base_overrides: dict = field(default_factory=dict)

    def build_spec(self, base: ScenarioConfig, replications: int = 20) -> SweepSpec:
        cfg = base
        for lever_name, value in self.base_overrides.items():
            cfg = replace(cfg, levers=replace(cfg.levers, **{lever_name: value}))
        cfg.validate()
        return SweepSpec(lever=self.lever, levels=self.levels, base=cfg, replications=replications)


# The first two experiments never promote anyone (threshold out of reach at
# the default learning volume); the third takes every learning opportunity.
EXPERIMENT_PRESETS: dict[str, ExperimentPreset] = {
    "empowerment": ExperimentPreset(
        name="empowerment",
        lever="empowerment",
        levels=(0.0, 0.25, 0.5, 0.75, 1.0),
        dependent_vars=("transactions", "overall_satisfaction", "refund_satisfaction"),
        base_overrides={"competence_threshold": 1.0},
    ),
    "learning": ExperimentPreset(
        name="learning",
        lever="empower_to_learn",
        levels=(0.0, 0.25, 0.5, 0.75, 1.0),
        dependent_vars=("mean_normal_expertise", "normal_utilization", "overall_satisfaction"),
        base_overrides={"competence_threshold": 1.0},
    ),
    "development": ExperimentPreset(
        name="development",
        lever="competence_threshold",
        levels=(0.0, 0.2, 0.4, 0.6, 0.8, 1.0),
        dependent_vars=("expert_utilization", "transactions", "overall_satisfaction"),
        base_overrides={"empower_to_learn": 1.0},
    ),
}
