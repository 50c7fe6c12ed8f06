"""Agent-based retail department simulator and experiment toolkit.

The package couples a deterministic discrete-event kernel with customer
and staff agents, per-need service queues, a weighted customer-experience
ledger, an experiment sweep runner and a small analysis suite (one-way
ANOVA, eta squared, Tukey HSD at a multiple-comparison-corrected alpha).
"""

__version__ = "0.1.0"

from .config import ScenarioConfig, default_config
from .engine import EventKind, Kernel, RngHub
from .experiments import EXPERIMENT_PRESETS, SweepSpec, run_replication, run_sweep, summarize
from .stats import anova_oneway, corrected_alpha, effect_size_label, f_upper_tail, tukey_hsd
from .world import Department, run_world

__all__ = [
    "EXPERIMENT_PRESETS",
    "Department",
    "EventKind",
    "Kernel",
    "RngHub",
    "ScenarioConfig",
    "SweepSpec",
    "anova_oneway",
    "corrected_alpha",
    "default_config",
    "effect_size_label",
    "f_upper_tail",
    "run_replication",
    "run_sweep",
    "run_world",
    "summarize",
    "tukey_hsd",
    "__version__",
]
