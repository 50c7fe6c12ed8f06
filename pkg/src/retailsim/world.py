"""One simulated department: roster, event handlers, full-run orchestration.

Everything mutable in a run hangs off a single ``Department`` instance, so
replications can execute in parallel processes without sharing state.  The
event handlers below are the only writers; the kernel fires them one at a
time.

Key service rules (the paper-facing behavior):

* Help requests go to the least-knowledgeable idle normal seller first
  (enquiries are spread to develop junior staff), overflowing to idle
  experts only when no normal is free.
* A normal seller facing a request beyond their level calls an expert
  over.  If one is idle the expert takes the customer on the spot and the
  seller may stay to observe (earning a knowledge point when the service
  completes); otherwise the customer joins the expert queue and the seller
  moves on - there is nobody to learn from.
* Refunds occupy a cashier.  An empowered cashier decides alone (slowly);
  a referring cashier holds the customer while an expert is located and
  rules on the claim, engaging the expert too when one is free.
"""

from __future__ import annotations

from .agents import (
    Action,
    Customer,
    CustomerState,
    Expertise,
    NeedProfile,
    PracticeLevers,
    RefundHandler,
    Staff,
    StaffRole,
    Trigger,
    customer_transition,
    learning_episode,
    promotion_check,
    refund_decision,
    refund_routing,
    staff_begin,
    staff_end,
)
from .config import ScenarioConfig
from .engine import EventKind, Kernel, RngHub
from .errors import ModelBug
from .metrics import MetricKind, MetricsLedger, ReplicationOutcome, finalize
from .queuing import Assigned, NeedClass, ServiceDesk, ServiceNeed

_HELP_LIKE = (NeedClass.HELP, NeedClass.EXPERT_HELP)
_RENEGE_LABEL = {
    NeedClass.HELP: "help",
    NeedClass.EXPERT_HELP: "help",
    NeedClass.PAYMENT: "payment",
    NeedClass.REFUND: "refund",
}


class _Task:
    __slots__ = ("kind", "staff", "customer", "learner", "assist", "approved")

    def __init__(self, kind: NeedClass, staff: Staff, customer: Customer,
                 learner: Staff | None = None, assist: Staff | None = None,
                 approved: bool | None = None):
        self.kind = kind
        self.staff = staff
        self.customer = customer
        self.learner = learner
        self.assist = assist
        self.approved = approved


class Department:
    def __init__(self, cfg: ScenarioConfig, master_seed: int | None = None):
        cfg.validate()
        self.cfg = cfg
        seed = cfg.master_seed if master_seed is None else master_seed
        self.kernel = Kernel()
        hub = RngHub(seed)
        self.rng_arrivals = hub.stream("arrivals")
        self.rng_attributes = hub.stream("attributes")
        self.rng_patience = hub.stream("patience")
        self.rng_browse = hub.stream("browsing")
        self.rng_branch = hub.stream("branching")
        self.rng_service = hub.stream("service")
        self.rng_payment = hub.stream("payment")
        self.rng_refunds = hub.stream("refunds")
        self.rng_refund_decisions = hub.stream("refund-decisions")
        self.rng_learning = hub.stream("learning")
        self.rng_locate = hub.stream("expert-locate")

        self.ledger = MetricsLedger(cfg.weights.as_kind_map())
        self.levers: PracticeLevers = cfg.levers
        p = cfg.profile
        self.need_profile = NeedProfile(
            p_help=p.p_help,
            p_direct_till=p.p_direct_till,
            p_leave_after_browse=p.p_leave_after_browse,
            p_rebrowse_while_waiting=p.p_rebrowse_while_waiting,
            p_refund_visit=p.p_refund_visit,
            p_till_after_help=p.p_till_after_help,
            expert_need_fraction=p.expert_need_fraction,
        )

        self.staff: list[Staff] = []
        next_id = 0
        for role, count in (
            (StaffRole.CASHIER, cfg.staffing.cashiers),
            (StaffRole.NORMAL_SELLER, cfg.staffing.normal_sellers),
            (StaffRole.EXPERT_SELLER, cfg.staffing.expert_sellers),
            (StaffRole.SECTION_MANAGER, cfg.staffing.section_managers),
        ):
            for _ in range(int(count)):
                self.staff.append(Staff(next_id, role))
                next_id += 1

        self._patience_by_class = {
            NeedClass.HELP: "patience_help",
            NeedClass.EXPERT_HELP: "patience_help",
            NeedClass.PAYMENT: "patience_till",
            NeedClass.REFUND: "patience_refund",
        }
        self.desk = ServiceDesk(self.kernel, self.staff, self._patience_for, cfg.queue_discipline)

        self.kernel.on(EventKind.ARRIVAL, self._on_arrival)
        self.kernel.on(EventKind.BROWSE_DONE, self._on_browse_done)
        self.kernel.on(EventKind.PATIENCE_EXPIRED, self._on_patience_expired)
        self.kernel.on(EventKind.SERVICE_DONE, self._on_service_done)
        self.kernel.on(EventKind.SHIFT_TICK, self._on_shift_tick)
        self.kernel.on(EventKind.HORIZON_REACHED, self._on_horizon)

        self.horizon = cfg.horizon_minutes
        self.customer_seq = 0
        self.horizon_seen = False

    # -- plumbing ----------------------------------------------------------

    def _patience_for(self, customer: Customer, klass: NeedClass) -> float:
        return getattr(customer, self._patience_by_class[klass])

    def _sample_service(self, required: Expertise) -> float:
        dist = self.cfg.profile.service_expert if required is Expertise.EXPERT else self.cfg.profile.service_normal
        return self.rng_service.sample(dist)

    # -- event handlers ----------------------------------------------------

    def _on_arrival(self, ev) -> None:
        now = self.kernel.now()
        p = self.cfg.profile
        customer = Customer(
            id=self.customer_seq,
            entered_at=now,
            profile=self.need_profile,
            refund_intent=bool(self.rng_attributes.bernoulli(p.p_refund_visit)),
            required_expertise=(
                Expertise.EXPERT
                if self.rng_attributes.bernoulli(p.expert_need_fraction)
                else Expertise.NORMAL
            ),
            patience_help=self.rng_patience.exponential(p.patience_help_mean),
            patience_till=self.rng_patience.exponential(p.patience_till_mean),
            patience_refund=self.rng_patience.exponential(p.patience_refund_mean),
            item_value=self.rng_attributes.sample(p.item_value),
        )
        self.customer_seq += 1
        self.ledger.entered += 1
        self._apply(customer, customer_transition(customer, Trigger.ENTERED, self.rng_branch))
        next_arrival = now + self.rng_arrivals.exponential(self.cfg.mean_interarrival)
        if next_arrival <= self.horizon:
            self.kernel.schedule(next_arrival, EventKind.ARRIVAL)

    def _on_browse_done(self, ev) -> None:
        customer = ev.target
        self._apply(customer, customer_transition(customer, Trigger.BROWSE_DONE, self.rng_branch))

    def _on_patience_expired(self, ev) -> None:
        entry = ev.target
        if not entry.alive:  # pragma: no cover - cancelled events never fire
            return
        self.desk.remove_reneged(entry)
        self.ledger.record_renege(_RENEGE_LABEL[entry.need.klass])
        customer = entry.customer
        self._apply(customer, customer_transition(customer, Trigger.PATIENCE_EXPIRED, self.rng_branch))

    def _on_shift_tick(self, ev) -> None:
        self.ledger.daily_transactions.append(self.ledger.transactions)
        nxt = self.kernel.now() + self.cfg.open_minutes_per_day
        if nxt < self.horizon:
            self.kernel.schedule(nxt, EventKind.SHIFT_TICK)

    def _on_horizon(self, ev) -> None:
        self.horizon_seen = True

    def _on_service_done(self, ev) -> None:
        task: _Task = ev.target
        now = self.kernel.now()
        customer = task.customer
        if task.kind in _HELP_LIKE:
            staff_end(task.staff, now)
            learner = task.learner
            if learner is not None:
                staff_end(learner, now)
                learner.knowledge_points += self.levers.points_per_episode
                if promotion_check(learner, self.levers):
                    self.ledger.promotions += 1
            self._apply(customer, customer_transition(customer, Trigger.SERVICE_DONE, self.rng_branch))
            if learner is not None:
                self._free(learner)
            self._free(task.staff)
        elif task.kind is NeedClass.PAYMENT:
            staff_end(task.staff, now)
            self.ledger.record(MetricKind.PURCHASE_COMPLETED)
            self.ledger.transactions += 1
            self.ledger.cashier_payment_tasks += 1
            self._apply(customer, customer_transition(customer, Trigger.PAYMENT_DONE, self.rng_branch))
            self._free(task.staff)
        elif task.kind is NeedClass.REFUND:
            staff_end(task.staff, now)
            if task.assist is not None:
                staff_end(task.assist, now)
            self.ledger.refunds_processed += 1
            if task.approved:
                self.ledger.refunds_granted += 1
                self.ledger.record(MetricKind.REFUND_GRANTED)
            else:
                self.ledger.record(MetricKind.REFUND_DENIED)
            self._apply(customer, customer_transition(customer, Trigger.REFUND_RESOLVED, self.rng_branch))
            if task.assist is not None:
                self._free(task.assist)
            self._free(task.staff)
        else:  # pragma: no cover
            raise ModelBug(f"service done for unexpected task kind {task.kind!r}")

    # -- statechart action interpreter --------------------------------------

    def _apply(self, customer: Customer, actions: list[Action]) -> None:
        for action in actions:
            if action is Action.SCHEDULE_BROWSE:
                delay = self.rng_browse.sample(self.cfg.profile.browse_time)
                self.kernel.schedule(self.kernel.now() + delay, EventKind.BROWSE_DONE, target=customer)
            elif action is Action.REQUEST_HELP:
                self._request(customer, ServiceNeed(NeedClass.HELP, customer.required_expertise))
            elif action is Action.REQUEST_PAYMENT:
                self._request(customer, ServiceNeed(NeedClass.PAYMENT))
            elif action is Action.REQUEST_REFUND:
                self._request(customer, ServiceNeed(NeedClass.REFUND))
            elif action is Action.DEPART:
                self.ledger.left[customer.outcome] += 1
            # CANCEL_PATIENCE is a statechart annotation; the desk already
            # cancelled the event when it pulled the entry from the queue.

    def _request(self, customer: Customer, need: ServiceNeed) -> None:
        result = self.desk.request_service(customer, need)
        if isinstance(result, Assigned):
            customer.waited = False
            if not self._start_service(result.staff, customer, need.klass):
                self._free(result.staff)
        else:
            customer.waited = True
            if need.klass is NeedClass.HELP:
                customer.state = CustomerState.WAITING_FOR_HELP
            elif need.klass is NeedClass.REFUND:
                customer.state = CustomerState.WAITING_FOR_REFUND
            # payment waits stay in QueueingAtTill

    # -- service starts ------------------------------------------------------

    def _start_service(self, staff: Staff, customer: Customer, klass: NeedClass, entry=None) -> bool:
        """Begin service; returns False when ``staff`` is free again."""
        if klass in _HELP_LIKE:
            return self._start_help(staff, customer, entry)
        if klass is NeedClass.PAYMENT:
            return self._start_payment(staff, customer)
        if klass is NeedClass.REFUND:
            return self._start_refund(staff, customer)
        raise ModelBug(f"cannot start service for {klass!r}")  # pragma: no cover

    def _record_service_start(self, customer: Customer) -> None:
        if customer.waited:
            self.ledger.record(MetricKind.SERVED_AFTER_WAIT)
        else:
            self.ledger.record(MetricKind.SERVED_IMMEDIATELY)

    def _start_help(self, staff: Staff, customer: Customer, entry=None) -> bool:
        now = self.kernel.now()
        if staff.role is StaffRole.NORMAL_SELLER and customer.required_expertise is Expertise.EXPERT:
            # Beyond this seller's level: an expert is called over, and the
            # seller decides now whether to stay and observe the expert.
            expert = None
            if self.desk.idle_experts and self.rng_locate.bernoulli(
                self.cfg.profile.expert_locate_probability
            ):
                expert = self.desk.take_idle_expert()
            if expert is not None:
                stayed = learning_episode(staff, expert, self.levers, self.rng_learning)
                self._begin_help_task(expert, customer, Expertise.EXPERT,
                                      learner=staff if stayed else None)
                return stayed
            # Nobody to call over right now: the customer queues for an
            # expert and the seller moves on, rejoining to observe when the
            # expert starts (if still free at that moment).
            stay_intent = bool(self.rng_learning.bernoulli(self.levers.empower_to_learn))
            self.desk.enqueue_expert_task(customer, learner=staff if stay_intent else None)
            customer.waited = True
            customer.state = CustomerState.WAITING_FOR_HELP
            return False
        learner = None
        if (
            staff.role is StaffRole.EXPERT_SELLER
            and entry is not None
            and entry.learner is not None
            and entry.learner.role is StaffRole.NORMAL_SELLER
            and now - entry.enqueued_at <= self.cfg.profile.learning_rejoin_window
            and self.desk.claim_idle_normal(entry.learner)
        ):
            learner = entry.learner
        self._begin_help_task(staff, customer, customer.required_expertise, learner=learner)
        return True

    def _begin_help_task(self, server: Staff, customer: Customer, required: Expertise,
                         learner: Staff | None) -> None:
        now = self.kernel.now()
        self._record_service_start(customer)
        self._apply(customer, customer_transition(customer, Trigger.HELP_ASSIGNED, self.rng_branch))
        duration = self._sample_service(required)
        if required is Expertise.NORMAL and server.role is StaffRole.EXPERT_SELLER:
            duration *= self.cfg.profile.expert_efficiency
        task = _Task(NeedClass.HELP, server, customer, learner=learner)
        staff_begin(server, task, now)
        if learner is not None:
            staff_begin(learner, task, now)
            self.ledger.learning_episodes += 1
        self.kernel.schedule(now + duration, EventKind.SERVICE_DONE, target=task)

    def _start_payment(self, staff: Staff, customer: Customer) -> bool:
        now = self.kernel.now()
        self._record_service_start(customer)
        self._apply(customer, customer_transition(customer, Trigger.TILL_ASSIGNED, self.rng_branch))
        duration = self.rng_payment.sample(self.cfg.profile.payment_time)
        task = _Task(NeedClass.PAYMENT, staff, customer)
        staff_begin(staff, task, now)
        self.kernel.schedule(now + duration, EventKind.SERVICE_DONE, target=task)
        return True

    def _start_refund(self, staff: Staff, customer: Customer) -> bool:
        now = self.kernel.now()
        rf = self.cfg.refunds
        self._record_service_start(customer)
        self._apply(customer, customer_transition(customer, Trigger.REFUND_ASSIGNED, self.rng_branch))
        handler = refund_routing(self.levers, self.rng_refunds)
        assist = None
        if handler is RefundHandler.CASHIER_AUTONOMOUS:
            duration = self.rng_refunds.sample(rf.autonomous_time)
        else:
            self.ledger.record(MetricKind.REFUND_REFERRED_WAIT)
            self.ledger.refunds_referred += 1
            assist = self.desk.take_idle_expert()
            locate = rf.locate_short if assist is not None else rf.locate_long
            duration = self.rng_refunds.sample(locate) + self.rng_refunds.sample(rf.decision_time)
        approved = refund_decision(
            handler, self.rng_refund_decisions, rf.cashier_approval, rf.expert_approval
        )
        task = _Task(NeedClass.REFUND, staff, customer, assist=assist, approved=approved)
        staff_begin(staff, task, now)
        if assist is not None:
            staff_begin(assist, task, now)
        self.kernel.schedule(now + duration, EventKind.SERVICE_DONE, target=task)
        return True

    def _free(self, staff: Staff) -> None:
        """Hand freed staff their next queued work until they stick or idle."""
        while True:
            entry = self.desk.on_staff_freed(staff)
            if entry is None:
                return
            customer = entry.customer
            customer.waited = True
            if self._start_service(staff, customer, entry.need.klass, entry):
                return

    # -- run ----------------------------------------------------------------

    def run(self) -> ReplicationOutcome:
        first = self.rng_arrivals.exponential(self.cfg.mean_interarrival)
        if first <= self.horizon:
            self.kernel.schedule(first, EventKind.ARRIVAL)
        if self.cfg.open_minutes_per_day < self.horizon:
            self.kernel.schedule(self.cfg.open_minutes_per_day, EventKind.SHIFT_TICK)
        self.kernel.schedule(self.horizon, EventKind.HORIZON_REACHED)
        self.kernel.run_until(self.horizon)
        # Close out busy time of anyone mid-task when the run stops.
        for s in self.staff:
            if s.current_task is not None:
                s.busy_minutes += self.horizon - s.task_started_at
                s.current_task = None
        return finalize(self.ledger, self.staff, self.horizon)


def run_world(cfg: ScenarioConfig, master_seed: int | None = None) -> ReplicationOutcome:
    """Build, run and tear down one department replication."""
    return Department(cfg, master_seed=master_seed).run()
