"""Scenario configuration: schema, validation, JSON round-trip, digest.

Config files are UTF-8 JSON mirroring the dataclass tree below.  Unknown
keys are rejected outright so a typo can never silently break the
ceteris-paribus property of a sweep.  Department profile values are
calibration defaults, not measurements; every one of them can be
overridden per run.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

from .agents import PracticeLevers
from .errors import ConfigError
from .metrics import MetricKind

_DIST_KINDS = {"exponential": 1, "uniform": 2, "triangular": 3, "bernoulli": 1}


def _check_dist(name: str, value) -> tuple:
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(name, f"expected [kind, params...], got {value!r}")
    kind, *params = value
    if kind not in _DIST_KINDS:
        raise ConfigError(name, f"unknown distribution kind {kind!r}")
    if len(params) != _DIST_KINDS[kind]:
        raise ConfigError(name, f"{kind} takes {_DIST_KINDS[kind]} parameter(s), got {len(params)}")
    try:
        params = [float(p) for p in params]
    except (TypeError, ValueError):
        raise ConfigError(name, f"non-numeric parameters in {value!r}") from None
    if kind == "exponential" and params[0] <= 0:
        raise ConfigError(name, "exponential mean must be > 0")
    if kind == "uniform" and params[0] > params[1]:
        raise ConfigError(name, "uniform needs a <= b")
    if kind == "triangular" and not (params[0] <= params[1] <= params[2]):
        raise ConfigError(name, "triangular needs a <= m <= b")
    if kind == "bernoulli" and not 0 <= params[0] <= 1:
        raise ConfigError(name, "bernoulli p must be in [0, 1]")
    return (kind, *params)


def _check_prob(name: str, value) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(name, f"expected a probability, got {value!r}") from None
    if not 0.0 <= v <= 1.0:
        raise ConfigError(name, f"must be in [0, 1], got {v}")
    return v


@dataclass(frozen=True)
class Staffing:
    cashiers: int = 3
    normal_sellers: int = 7
    expert_sellers: int = 2
    section_managers: int = 1  # roster fidelity only; never matched to work


@dataclass(frozen=True)
class DepartmentProfile:
    """Post-browse branching and the service-time distributions.

    The womenswear department sells mostly unassisted and serves quickly;
    audio & TV customers ask for advice far more and occupy staff longer.
    """

    name: str = "womenswear"
    p_help: float = 0.25
    p_direct_till: float = 0.42
    p_leave_after_browse: float = 0.33
    p_rebrowse_while_waiting: float = 0.20
    p_refund_visit: float = 0.05
    # Assisted purchases close with the seller; only till visits count as
    # transactions.
    p_till_after_help: float = 0.0
    expert_need_fraction: float = 0.18
    # A free expert is not always on hand to call over; past this, the
    # customer waits in the specialist queue.
    expert_locate_probability: float = 0.45
    # Experts clear ordinary enquiries faster than normal sellers do.
    expert_efficiency: float = 0.7
    # A referring seller rejoins to observe only when the expert takes over
    # within this window; later than that they are absorbed in other work.
    learning_rejoin_window: float = 45.0
    browse_time: tuple = ("triangular", 1.0, 5.0, 15.0)
    service_normal: tuple = ("triangular", 9.0, 20.0, 40.0)
    service_expert: tuple = ("triangular", 14.0, 30.0, 58.0)
    payment_time: tuple = ("triangular", 2.0, 4.0, 8.0)
    item_value: tuple = ("triangular", 5.0, 30.0, 120.0)
    patience_help_mean: float = 8.0
    patience_till_mean: float = 8.0
    # Customers committed to a specific outcome hold on much longer: the
    # referred-to-specialist wait and the refund counter.
    patience_expert_mean: float = 30.0
    patience_refund_mean: float = 15.0


PROFILE_PRESETS: dict[str, dict] = {
    "womenswear": {},
    # Qualitative contrast preset: far more advice-seeking, fewer unassisted
    # sales, longer consultations, pricier goods.  Not calibrated for the
    # default staffing level.
    "audio_tv": {
        "p_help": 0.55,
        "p_direct_till": 0.25,
        "p_leave_after_browse": 0.20,
        "service_normal": ("triangular", 14.0, 30.0, 62.0),
        "service_expert": ("triangular", 28.0, 56.0, 112.0),
        "item_value": ("triangular", 40.0, 250.0, 1200.0),
    },
}


@dataclass(frozen=True)
class SatisfactionWeights:
    served_immediately: float = 2.0
    served_after_wait: float = 1.0
    left_queue: float = -3.0
    purchase_completed: float = 1.0
    refund_granted: float = 3.0
    refund_denied: float = -4.0
    refund_referred_wait: float = -1.0

    def as_kind_map(self) -> dict[MetricKind, float]:
        return {kind: float(getattr(self, kind.value)) for kind in MetricKind}


@dataclass(frozen=True)
class RefundPolicy:
    cashier_approval: float = 0.8
    expert_approval: float = 0.7
    # An empowered cashier puzzles through the claim alone; a referred one
    # only holds the customer while an expert is found and decides.
    autonomous_time: tuple = ("triangular", 4.0, 8.5, 13.5)
    locate_short: tuple = ("triangular", 0.3, 0.6, 1.2)
    locate_long: tuple = ("triangular", 3.0, 6.5, 11.5)
    decision_time: tuple = ("triangular", 0.75, 1.5, 2.75)


@dataclass(frozen=True)
class ScenarioConfig:
    master_seed: int = 42
    arrival_rate_per_hour: float = 70.0
    horizon_weeks: float = 10.0
    days_per_week: int = 7
    hours_per_day: float = 8.0
    queue_discipline: str = "longest-wait-first"
    staffing: Staffing = field(default_factory=Staffing)
    profile: DepartmentProfile = field(default_factory=DepartmentProfile)
    levers: PracticeLevers = field(default_factory=PracticeLevers)
    weights: SatisfactionWeights = field(default_factory=SatisfactionWeights)
    refunds: RefundPolicy = field(default_factory=RefundPolicy)

    @property
    def open_minutes_per_day(self) -> float:
        return self.hours_per_day * 60.0

    @property
    def horizon_minutes(self) -> float:
        return self.horizon_weeks * self.days_per_week * self.open_minutes_per_day

    @property
    def mean_interarrival(self) -> float:
        return 60.0 / self.arrival_rate_per_hour

    def validate(self) -> None:
        if int(self.master_seed) != self.master_seed or self.master_seed < 0:
            raise ConfigError("master_seed", f"must be a non-negative integer, got {self.master_seed}")
        if self.arrival_rate_per_hour <= 0:
            raise ConfigError("arrival_rate_per_hour", f"must be > 0, got {self.arrival_rate_per_hour}")
        if self.horizon_weeks <= 0:
            raise ConfigError("horizon_weeks", f"must be > 0, got {self.horizon_weeks}")
        if self.days_per_week < 1 or self.days_per_week > 7:
            raise ConfigError("days_per_week", f"must be in 1..7, got {self.days_per_week}")
        if self.hours_per_day <= 0 or self.hours_per_day > 24:
            raise ConfigError("hours_per_day", f"must be in (0, 24], got {self.hours_per_day}")
        if self.queue_discipline not in ("longest-wait-first", "need-priority"):
            raise ConfigError("queue_discipline", f"unknown discipline {self.queue_discipline!r}")
        st = self.staffing
        for fname in ("cashiers", "normal_sellers", "expert_sellers", "section_managers"):
            v = getattr(st, fname)
            if int(v) != v or v < 0:
                raise ConfigError(f"staffing.{fname}", f"must be a non-negative integer, got {v}")
        p = self.profile
        if p.name not in PROFILE_PRESETS:
            raise ConfigError("profile.name", f"unknown profile {p.name!r}")
        for fname in (
            "p_help",
            "p_direct_till",
            "p_leave_after_browse",
            "p_rebrowse_while_waiting",
            "p_refund_visit",
            "p_till_after_help",
            "expert_need_fraction",
            "expert_locate_probability",
        ):
            _check_prob(f"profile.{fname}", getattr(p, fname))
        branch_sum = p.p_help + p.p_direct_till + p.p_leave_after_browse
        if abs(branch_sum - 1.0) > 1e-9:
            raise ConfigError(
                "profile.p_help", f"post-browse probabilities must sum to 1, got {branch_sum}"
            )
        for fname in ("browse_time", "service_normal", "service_expert", "payment_time", "item_value"):
            _check_dist(f"profile.{fname}", getattr(p, fname))
        for fname in (
            "patience_help_mean",
            "patience_till_mean",
            "patience_expert_mean",
            "patience_refund_mean",
        ):
            if getattr(p, fname) <= 0:
                raise ConfigError(f"profile.{fname}", "patience mean must be > 0")
        if p.learning_rejoin_window < 0:
            raise ConfigError("profile.learning_rejoin_window", "must be >= 0")
        if not 0 < p.expert_efficiency <= 1:
            raise ConfigError("profile.expert_efficiency", "must be in (0, 1]")
        lv = self.levers
        for fname in ("empowerment", "empower_to_learn", "competence_threshold"):
            _check_prob(f"levers.{fname}", getattr(lv, fname))
        if lv.knowledge_scale < 1 or int(lv.knowledge_scale) != lv.knowledge_scale:
            raise ConfigError("levers.knowledge_scale", f"must be a positive integer, got {lv.knowledge_scale}")
        if lv.points_per_episode < 1 or int(lv.points_per_episode) != lv.points_per_episode:
            raise ConfigError("levers.points_per_episode", f"must be a positive integer, got {lv.points_per_episode}")
        rf = self.refunds
        _check_prob("refunds.cashier_approval", rf.cashier_approval)
        _check_prob("refunds.expert_approval", rf.expert_approval)
        for fname in ("autonomous_time", "locate_short", "locate_long", "decision_time"):
            _check_dist(f"refunds.{fname}", getattr(rf, fname))
        for fname in (f.name for f in fields(SatisfactionWeights)):
            v = getattr(self.weights, fname)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"weights.{fname}", f"must be a finite number, got {v!r}")

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("browse_time", "service_normal", "service_expert", "payment_time", "item_value"):
            d["profile"][key] = list(d["profile"][key])
        for key in ("autonomous_time", "locate_short", "locate_long", "decision_time"):
            d["refunds"][key] = list(d["refunds"][key])
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        cfg = _build(cls, data, path="")
        cfg.validate()
        return cfg

    def digest(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


_SECTION_TYPES = {
    "staffing": Staffing,
    "profile": DepartmentProfile,
    "levers": PracticeLevers,
    "weights": SatisfactionWeights,
    "refunds": RefundPolicy,
}

_TUPLE_FIELDS = {
    "browse_time",
    "service_normal",
    "service_expert",
    "payment_time",
    "item_value",
    "autonomous_time",
    "locate_short",
    "locate_long",
    "decision_time",
}


def _build(cls, data: dict, path: str):
    if not isinstance(data, dict):
        raise ConfigError(path or "config", f"expected an object, got {data!r}")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        where = f"{path}." if path else ""
        raise ConfigError(f"{where}{sorted(unknown)[0]}", "unknown key")
    kwargs = {}
    for f in fields(cls):
        if f.name not in data:
            continue
        value = data[f.name]
        sub = _SECTION_TYPES.get(f.name)
        if sub is not None and cls is ScenarioConfig:
            if f.name == "profile" and isinstance(value, dict):
                preset = dict(PROFILE_PRESETS.get(value.get("name", "womenswear"), {}))
                preset.update(value)
                value = preset
            kwargs[f.name] = _build(sub, value, f.name)
        elif f.name in _TUPLE_FIELDS and isinstance(value, list):
            kwargs[f.name] = tuple(value)
        else:
            kwargs[f.name] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(path or "config", str(exc)) from None


def default_config() -> ScenarioConfig:
    return ScenarioConfig()


def load_config(path: str) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON in {path}: {exc}") from None
    return ScenarioConfig.from_dict(data)


def _parse_override_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_overrides(cfg: ScenarioConfig, overrides: dict[str, str]) -> ScenarioConfig:
    """Apply dotted-path overrides like ``levers.empowerment=1``."""
    data = cfg.to_dict()
    for dotted, raw in overrides.items():
        value = _parse_override_value(raw) if isinstance(raw, str) else raw
        parts = dotted.split(".")
        node = data
        for part in parts[:-1]:
            if not isinstance(node, dict) or part not in node:
                raise ConfigError(dotted, "unknown key")
            node = node[part]
        if not isinstance(node, dict) or parts[-1] not in node:
            raise ConfigError(dotted, "unknown key")
        node[parts[-1]] = value
    return ScenarioConfig.from_dict(data)


def set_lever(cfg: ScenarioConfig, lever: str, value: float) -> ScenarioConfig:
    """Replace exactly one practice lever, leaving everything else frozen."""
    if lever not in ("empowerment", "empower_to_learn", "competence_threshold"):
        raise ConfigError(f"levers.{lever}", "not a sweepable lever")
    new_levers = replace(cfg.levers, **{lever: value})
    cfg2 = replace(cfg, levers=new_levers)
    cfg2.validate()
    return cfg2
