"""Service matchmaking: per-need queues, staff selection, reneging.

Four department-level pools are kept:

* ``help``        - fresh help requests; normal sellers take them first,
                    experts only when no normal is free.
* ``expert_help`` - requests a normal seller could not meet and no expert
                    was free to take over on the spot; experts only.
* ``payment`` / ``refund`` - cashier work.

Within a pool entries are FIFO.  When a staff member frees up and more
than one compatible pool has work, the configured discipline picks the
pool: ``longest-wait-first`` compares head-of-line waits, ``need-priority``
uses a fixed need order (payment before refund, specialist work before
fresh help).
"""

from __future__ import annotations

import enum
from collections import deque

from .agents import Customer, Expertise, Staff, StaffRole
from .engine import Event, EventKind, Kernel


class NeedClass(enum.Enum):
    HELP = "help"
    EXPERT_HELP = "expert_help"
    PAYMENT = "payment"
    REFUND = "refund"


class ServiceNeed:
    """A concrete request: a need class plus required expertise for help."""

    __slots__ = ("klass", "required")

    def __init__(self, klass: NeedClass, required: Expertise | None = None):
        self.klass = klass
        self.required = required

    def __repr__(self):  # pragma: no cover - debugging aid
        if self.required is not None:
            return f"ServiceNeed({self.klass.value}, {self.required.value})"
        return f"ServiceNeed({self.klass.value})"


NEED_PAYMENT = ServiceNeed(NeedClass.PAYMENT)
NEED_REFUND = ServiceNeed(NeedClass.REFUND)


class QueueEntry:
    __slots__ = ("customer", "need", "enqueued_at", "patience_event", "alive", "learner")

    def __init__(self, customer: Customer, need: ServiceNeed, enqueued_at: float, patience_event: Event):
        self.customer = customer
        self.need = need
        self.enqueued_at = enqueued_at
        self.patience_event = patience_event
        self.alive = True
        # Normal seller intending to observe the expert service, if any.
        self.learner: Staff | None = None


class Assigned:
    __slots__ = ("staff",)

    def __init__(self, staff: Staff):
        self.staff = staff


class Queued:
    __slots__ = ("entry",)

    def __init__(self, entry: QueueEntry):
        self.entry = entry


_CASHIER_POOLS = (NeedClass.PAYMENT, NeedClass.REFUND)
_EXPERT_POOLS = (NeedClass.EXPERT_HELP, NeedClass.HELP)
_NEED_PRIORITY = {
    NeedClass.PAYMENT: 0,
    NeedClass.REFUND: 1,
    NeedClass.EXPERT_HELP: 2,
    NeedClass.HELP: 3,
}


class ServiceDesk:
    """Queue mechanics for one department; metric recording stays outside."""

    def __init__(self, kernel: Kernel, staff: list[Staff], patience_for, discipline: str = "longest-wait-first"):
        self.kernel = kernel
        self.staff = staff
        self.patience_for = patience_for  # (customer, NeedClass) -> minutes
        if discipline not in ("longest-wait-first", "need-priority"):
            raise ValueError(f"unknown queue discipline {discipline!r}")
        self.discipline = discipline
        self.queues: dict[NeedClass, deque[QueueEntry]] = {klass: deque() for klass in NeedClass}
        # Idle pools; cashier/expert pools are FIFO by time freed.
        self.idle_cashiers: deque[Staff] = deque(s for s in staff if s.role is StaffRole.CASHIER)
        self.idle_experts: deque[Staff] = deque(s for s in staff if s.role is StaffRole.EXPERT_SELLER)
        self.idle_normals: list[Staff] = [s for s in staff if s.role is StaffRole.NORMAL_SELLER]
        self.queued_total = 0

    # -- idle pool helpers ------------------------------------------------

    def take_idle_normal(self) -> Staff | None:
        """Least-knowledge-first: enquiries develop the least-trained seller.

        Deterministic tie-break on staff id keeps replays stable and the
        realized knowledge spread across sellers tight.
        """
        pool = self.idle_normals
        if not pool:
            return None
        best = min(pool, key=lambda s: (s.knowledge_points, s.id))
        pool.remove(best)
        return best

    def take_idle_expert(self) -> Staff | None:
        if self.idle_experts:
            return self.idle_experts.popleft()
        return None

    def claim_idle_normal(self, staff: Staff) -> bool:
        """Pull a specific normal seller out of the idle pool if present."""
        try:
            self.idle_normals.remove(staff)
            return True
        except ValueError:
            return False

    def take_idle_cashier(self) -> Staff | None:
        if self.idle_cashiers:
            return self.idle_cashiers.popleft()
        return None

    def _head(self, klass: NeedClass) -> QueueEntry | None:
        q = self.queues[klass]
        while q and not q[0].alive:
            q.popleft()
        return q[0] if q else None

    # -- the three public operations --------------------------------------

    def request_service(self, customer: Customer, need: ServiceNeed) -> Assigned | Queued:
        """Immediate assignment when a qualified staff member is free.

        Fresh help requests go to normal sellers; an idle expert steps in
        only when no seller is free and no referral or floor backlog is
        waiting (experts respond to what lands in front of them, they do
        not watch the queue).
        """
        klass = need.klass
        if klass is NeedClass.HELP:
            staff = self.take_idle_normal()
            if (
                staff is None
                and self.idle_experts
                and self._head(NeedClass.EXPERT_HELP) is None
            ):
                staff = self.idle_experts.popleft()
        elif klass is NeedClass.EXPERT_HELP:
            staff = self.take_idle_expert()
        else:
            staff = self.take_idle_cashier()
        if staff is not None:
            return Assigned(staff)
        return Queued(self._enqueue(customer, need))

    def _enqueue(self, customer: Customer, need: ServiceNeed) -> QueueEntry:
        now = self.kernel.now()
        patience = self.patience_for(customer, need.klass)
        entry = QueueEntry(customer, need, now, None)
        entry.patience_event = self.kernel.schedule(
            now + patience, EventKind.PATIENCE_EXPIRED, target=entry
        )
        self.queues[need.klass].append(entry)
        self.queued_total += 1
        return entry

    def enqueue_expert_task(self, customer: Customer, learner: Staff | None = None) -> QueueEntry:
        """Park a beyond-normal-level request until an expert frees up."""
        entry = self._enqueue(customer, ServiceNeed(NeedClass.EXPERT_HELP, Expertise.EXPERT))
        entry.learner = learner
        return entry

    def on_staff_freed(self, staff: Staff) -> QueueEntry | None:
        """Hand the freed member the waiting entry its discipline picks.

        Returns the entry (with its patience event already cancelled) or
        None when no compatible work waits; in that case the member joins
        its idle pool.
        """
        role = staff.role
        if role is StaffRole.CASHIER:
            pools = _CASHIER_POOLS
        elif role is StaffRole.EXPERT_SELLER:
            pools = _EXPERT_POOLS
        elif role is StaffRole.NORMAL_SELLER:
            pools = (NeedClass.HELP,)
        else:
            return None  # section managers never serve

        best_entry = None
        if self.discipline == "longest-wait-first":
            for klass in pools:
                head = self._head(klass)
                if head is not None and (
                    best_entry is None or head.enqueued_at < best_entry.enqueued_at
                ):
                    best_entry = head
        else:  # need-priority
            for klass in sorted(pools, key=_NEED_PRIORITY.get):
                head = self._head(klass)
                if head is not None:
                    best_entry = head
                    break

        if best_entry is None:
            if role is StaffRole.CASHIER:
                self.idle_cashiers.append(staff)
            elif role is StaffRole.EXPERT_SELLER:
                self.idle_experts.append(staff)
            else:
                self.idle_normals.append(staff)
            return None

        self.queues[best_entry.need.klass].popleft()
        best_entry.alive = False
        self.kernel.cancel(best_entry.patience_event)
        return best_entry

    def remove_reneged(self, entry: QueueEntry) -> None:
        """Drop an entry whose patience event fired; lazy queue cleanup."""
        entry.alive = False

    def live_queue_lengths(self) -> dict[str, int]:
        return {
            klass.value: sum(1 for e in self.queues[klass] if e.alive) for klass in NeedClass
        }
