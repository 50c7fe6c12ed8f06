"""Outcome measures: transactions, the service-level index, utilization.

The service-level index is a running signed sum of weighted customer
experience events.  Refund satisfaction is the same sum restricted to the
three refund kinds, so changing help-queue weights can never move it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields

from .agents import Outcome, Staff, StaffRole
from .errors import EmptyClass, UnknownKind


class MetricKind(enum.Enum):
    SERVED_IMMEDIATELY = "served_immediately"
    SERVED_AFTER_WAIT = "served_after_wait"
    LEFT_QUEUE = "left_queue"
    PURCHASE_COMPLETED = "purchase_completed"
    REFUND_GRANTED = "refund_granted"
    REFUND_DENIED = "refund_denied"
    REFUND_REFERRED_WAIT = "refund_referred_wait"


REFUND_KINDS = frozenset(
    {MetricKind.REFUND_GRANTED, MetricKind.REFUND_DENIED, MetricKind.REFUND_REFERRED_WAIT}
)

DEFAULT_WEIGHTS = {
    MetricKind.SERVED_IMMEDIATELY: 2.0,
    MetricKind.SERVED_AFTER_WAIT: 1.0,
    MetricKind.LEFT_QUEUE: -3.0,
    MetricKind.PURCHASE_COMPLETED: 1.0,
    MetricKind.REFUND_GRANTED: 3.0,
    MetricKind.REFUND_DENIED: -4.0,
    MetricKind.REFUND_REFERRED_WAIT: -1.0,
}


class MetricsLedger:
    """Per-replication counters and weighted satisfaction sums."""

    def __init__(self, weights: dict[MetricKind, float] | None = None):
        self.weights = dict(DEFAULT_WEIGHTS if weights is None else weights)
        self.counts = {kind: 0 for kind in MetricKind}
        self.overall_satisfaction = 0.0
        self.refund_satisfaction = 0.0
        self.transactions = 0
        self.entered = 0
        self.left = {outcome: 0 for outcome in Outcome}
        self.renege_by_need: dict[str, int] = {}
        self.refunds_processed = 0
        self.refunds_granted = 0
        self.refunds_referred = 0
        self.cashier_payment_tasks = 0
        self.learning_episodes = 0
        self.promotions = 0
        self.daily_transactions: list[int] = []

    def record(self, kind: MetricKind) -> None:
        weight = self.weights.get(kind)
        if weight is None:
            raise UnknownKind(f"no weight configured for {kind!r}")
        self.counts[kind] += 1
        self.overall_satisfaction += weight
        if kind in REFUND_KINDS:
            self.refund_satisfaction += weight

    def record_renege(self, need_label: str) -> None:
        self.record(MetricKind.LEFT_QUEUE)
        self.renege_by_need[need_label] = self.renege_by_need.get(need_label, 0) + 1

    def recompute_satisfaction(self) -> tuple[float, float]:
        """Re-derive both sums from the counters (identity check hook)."""
        overall = sum(self.counts[k] * self.weights[k] for k in self.counts)
        refund = sum(self.counts[k] * self.weights[k] for k in REFUND_KINDS)
        return overall, refund


def utilization(staff: list[Staff], role: StaffRole, scheduled_minutes: float) -> float:
    """Mean busy share for one role class; staff are classed as of now.

    Promoted sellers therefore count toward the expert class at the
    horizon, carrying their whole-run busy time with them.
    """
    if scheduled_minutes <= 0:
        raise ValueError(f"scheduled_minutes must be > 0, got {scheduled_minutes}")
    members = [s for s in staff if s.role is role]
    if not members:
        raise EmptyClass(f"no staff in class {role.value}")
    return sum(s.busy_minutes for s in members) / (len(members) * scheduled_minutes)


@dataclass(frozen=True)
class ReplicationOutcome:
    """One run's outcome vector; one CSV row."""

    transactions: int
    overall_satisfaction: float
    refund_satisfaction: float
    mean_normal_expertise: float | None
    max_normal_expertise: float | None
    normal_utilization: float | None
    expert_utilization: float | None
    cashier_utilization: float | None
    renege_help: int
    renege_till: int
    renege_refund: int
    entered: int
    in_system_at_horizon: int
    refunds_processed: int
    refunds_granted: int
    refunds_referred: int
    learning_episodes: int
    promotions: int
    normal_sellers_remaining: int

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def finalize(ledger: MetricsLedger, staff: list[Staff], horizon_minutes: float) -> ReplicationOutcome:
    """Snapshot the end-of-run outcome vector.

    Normal-staff measures cover whoever is still a normal seller at the
    horizon and are reported absent (None) once everyone has been promoted.
    Expert utilization covers the staff *hired* as experts, so promotions
    enlarge the working expert pool without redefining whose workload the
    measure tracks.
    """
    normals = [s for s in staff if s.role is StaffRole.NORMAL_SELLER]
    seed_experts = [s for s in staff if s.birth_role is StaffRole.EXPERT_SELLER]

    def class_util(members: list[Staff]) -> float | None:
        if not members:
            return None
        return sum(s.busy_minutes for s in members) / (len(members) * horizon_minutes)

    exits = sum(ledger.left.values())
    return ReplicationOutcome(
        transactions=ledger.transactions,
        overall_satisfaction=ledger.overall_satisfaction,
        refund_satisfaction=ledger.refund_satisfaction,
        mean_normal_expertise=(
            sum(s.knowledge_points for s in normals) / len(normals) if normals else None
        ),
        max_normal_expertise=(max(s.knowledge_points for s in normals) if normals else None),
        normal_utilization=class_util(normals),
        expert_utilization=class_util(seed_experts),
        cashier_utilization=class_util([s for s in staff if s.role is StaffRole.CASHIER]),
        renege_help=ledger.renege_by_need.get("help", 0),
        renege_till=ledger.renege_by_need.get("payment", 0),
        renege_refund=ledger.renege_by_need.get("refund", 0),
        entered=ledger.entered,
        in_system_at_horizon=ledger.entered - exits,
        refunds_processed=ledger.refunds_processed,
        refunds_granted=ledger.refunds_granted,
        refunds_referred=ledger.refunds_referred,
        learning_episodes=ledger.learning_episodes,
        promotions=ledger.promotions,
        normal_sellers_remaining=len(normals),
    )
