"""Customer and staff agents: statecharts, refund policy, learning.

The customer statechart has three service blocks (help, till, refund)
with the same skeleton: try to obtain service, queue if nobody suitable
is free, then either get served or give up when patience runs out.  The
full edge set lives in ``EDGES`` and is the canonical chart; anything
outside it raises ``IllegalTransition`` and aborts the replication.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .engine import RngStream
from .errors import DoubleAssign, EndWhileIdle, IllegalTransition, ModelBug


class CustomerState(enum.Enum):
    CONTEMPLATING = "Contemplating"
    BROWSING = "Browsing"
    SEEKING_HELP = "SeekingHelp"
    WAITING_FOR_HELP = "WaitingForHelp"
    BEING_HELPED = "BeingHelped"
    QUEUEING_AT_TILL = "QueueingAtTill"
    PAYING = "Paying"
    SEEKING_REFUND = "SeekingRefund"
    WAITING_FOR_REFUND = "WaitingForRefund"
    REFUND_PROCESSING = "RefundProcessing"
    LEFT = "Left"


class Outcome(enum.Enum):
    PURCHASED = "Purchased"
    NO_PURCHASE = "NoPurchase"
    RENEGED_HELP = "RenegedHelp"
    RENEGED_TILL = "RenegedTill"
    RENEGED_REFUND = "RenegedRefund"
    REFUND_DONE = "RefundDone"


class Trigger(enum.Enum):
    ENTERED = "Entered"
    BROWSE_DONE = "BrowseDone"
    HELP_ASSIGNED = "HelpAssigned"
    SERVICE_DONE = "ServiceDone"
    PATIENCE_EXPIRED = "PatienceExpired"
    TILL_ASSIGNED = "TillAssigned"
    PAYMENT_DONE = "PaymentDone"
    REFUND_ASSIGNED = "RefundAssigned"
    REFUND_RESOLVED = "RefundResolved"


class Expertise(enum.Enum):
    NORMAL = "Normal"
    EXPERT = "Expert"


class StaffRole(enum.Enum):
    CASHIER = "Cashier"
    NORMAL_SELLER = "NormalSeller"
    EXPERT_SELLER = "ExpertSeller"
    SECTION_MANAGER = "SectionManager"


# Actions handed back to the event loop by customer_transition.
class Action(enum.Enum):
    SCHEDULE_BROWSE = "schedule_browse"
    REQUEST_HELP = "request_help"
    REQUEST_PAYMENT = "request_payment"
    REQUEST_REFUND = "request_refund"
    CANCEL_PATIENCE = "cancel_patience"
    DEPART = "depart"


@dataclass(frozen=True)
class NeedProfile:
    """Branch probabilities shared by every customer of a department."""

    p_help: float
    p_direct_till: float
    p_leave_after_browse: float
    p_rebrowse_while_waiting: float
    p_refund_visit: float
    p_till_after_help: float
    expert_need_fraction: float


class Customer:
    __slots__ = (
        "id",
        "state",
        "entered_at",
        "profile",
        "refund_intent",
        "required_expertise",
        "patience_help",
        "patience_till",
        "patience_refund",
        "item_value",
        "outcome",
        "waited",
    )

    def __init__(
        self,
        id: int,
        entered_at: float,
        profile: NeedProfile,
        refund_intent: bool,
        required_expertise: Expertise,
        patience_help: float,
        patience_till: float,
        patience_refund: float,
        item_value: float,
    ):
        self.id = id
        self.state = CustomerState.CONTEMPLATING
        self.entered_at = entered_at
        self.profile = profile
        self.refund_intent = refund_intent
        self.required_expertise = required_expertise
        self.patience_help = patience_help
        self.patience_till = patience_till
        self.patience_refund = patience_refund
        self.item_value = item_value
        self.outcome: Outcome | None = None
        self.waited = False  # set while the current request sits in a queue


class Staff:
    __slots__ = (
        "id",
        "role",
        "birth_role",
        "knowledge_points",
        "busy_minutes",
        "current_task",
        "task_started_at",
    )

    def __init__(self, id: int, role: StaffRole):
        self.id = id
        self.role = role
        self.birth_role = role  # role as hired; promotion changes only `role`
        self.knowledge_points = 0
        self.busy_minutes = 0.0
        self.current_task = None
        self.task_started_at = 0.0

    @property
    def busy(self) -> bool:
        return self.current_task is not None


@dataclass(frozen=True)
class PracticeLevers:
    """The three management-practice dials of the experiments."""

    empowerment: float = 0.5
    empower_to_learn: float = 0.5
    competence_threshold: float = 1.0
    knowledge_scale: int = 100
    points_per_episode: int = 1

    @property
    def promotion_trigger_point(self) -> int:
        return round(self.competence_threshold * self.knowledge_scale)


class RefundHandler(enum.Enum):
    CASHIER_AUTONOMOUS = "CashierAutonomous"
    REFER_TO_EXPERT = "ReferToExpert"


class PostBrowse(enum.Enum):
    SEEK_HELP = "SeekHelp"
    GO_TO_TILL = "GoToTill"
    LEAVE = "Leave"


# Canonical statechart edges: (state, trigger) pairs with defined behavior.
EDGES = frozenset(
    {
        (CustomerState.CONTEMPLATING, Trigger.ENTERED),
        (CustomerState.BROWSING, Trigger.BROWSE_DONE),
        (CustomerState.SEEKING_HELP, Trigger.HELP_ASSIGNED),
        (CustomerState.WAITING_FOR_HELP, Trigger.HELP_ASSIGNED),
        (CustomerState.WAITING_FOR_HELP, Trigger.PATIENCE_EXPIRED),
        (CustomerState.BEING_HELPED, Trigger.SERVICE_DONE),
        (CustomerState.QUEUEING_AT_TILL, Trigger.TILL_ASSIGNED),
        (CustomerState.QUEUEING_AT_TILL, Trigger.PATIENCE_EXPIRED),
        (CustomerState.PAYING, Trigger.PAYMENT_DONE),
        (CustomerState.SEEKING_REFUND, Trigger.REFUND_ASSIGNED),
        (CustomerState.WAITING_FOR_REFUND, Trigger.REFUND_ASSIGNED),
        (CustomerState.WAITING_FOR_REFUND, Trigger.PATIENCE_EXPIRED),
        (CustomerState.REFUND_PROCESSING, Trigger.REFUND_RESOLVED),
    }
)

_RENEGE_OUTCOME = {
    CustomerState.WAITING_FOR_HELP: Outcome.RENEGED_HELP,
    CustomerState.QUEUEING_AT_TILL: Outcome.RENEGED_TILL,
    CustomerState.WAITING_FOR_REFUND: Outcome.RENEGED_REFUND,
}


def post_browse_branch(c: Customer, rng: RngStream) -> PostBrowse:
    """Draw the after-browsing branch from the customer's need profile."""
    u = rng.random()
    p = c.profile
    if u < p.p_help:
        return PostBrowse.SEEK_HELP
    if u < p.p_help + p.p_direct_till:
        return PostBrowse.GO_TO_TILL
    return PostBrowse.LEAVE


def customer_transition(c: Customer, trigger: Trigger, branch_rng: RngStream) -> list[Action]:
    """Advance the customer statechart; returns actions for the event loop.

    Raising ``IllegalTransition`` for a pair outside ``EDGES`` signals a
    model bug; the replication is expected to abort rather than continue
    with a corrupted world.
    """
    state = c.state
    if (state, trigger) not in EDGES:
        raise IllegalTransition(f"customer {c.id}: no edge for ({state.value}, {trigger.value})")

    if trigger is Trigger.ENTERED:
        if c.refund_intent:
            c.state = CustomerState.SEEKING_REFUND
            return [Action.REQUEST_REFUND]
        c.state = CustomerState.BROWSING
        return [Action.SCHEDULE_BROWSE]

    if trigger is Trigger.BROWSE_DONE:
        branch = post_browse_branch(c, branch_rng)
        if branch is PostBrowse.SEEK_HELP:
            c.state = CustomerState.SEEKING_HELP
            return [Action.REQUEST_HELP]
        if branch is PostBrowse.GO_TO_TILL:
            c.state = CustomerState.QUEUEING_AT_TILL
            return [Action.REQUEST_PAYMENT]
        c.state = CustomerState.LEFT
        c.outcome = Outcome.NO_PURCHASE
        return [Action.DEPART]

    if trigger is Trigger.HELP_ASSIGNED:
        waited = state is CustomerState.WAITING_FOR_HELP
        c.state = CustomerState.BEING_HELPED
        return [Action.CANCEL_PATIENCE] if waited else []

    if trigger is Trigger.PATIENCE_EXPIRED:
        if branch_rng.random() < c.profile.p_rebrowse_while_waiting:
            c.state = CustomerState.BROWSING
            return [Action.SCHEDULE_BROWSE]
        c.outcome = _RENEGE_OUTCOME[state]
        c.state = CustomerState.LEFT
        return [Action.DEPART]

    if trigger is Trigger.SERVICE_DONE:
        if branch_rng.random() < c.profile.p_till_after_help:
            c.state = CustomerState.QUEUEING_AT_TILL
            return [Action.REQUEST_PAYMENT]
        c.state = CustomerState.LEFT
        c.outcome = Outcome.NO_PURCHASE
        return [Action.DEPART]

    if trigger is Trigger.TILL_ASSIGNED:
        c.state = CustomerState.PAYING
        return [Action.CANCEL_PATIENCE] if c.waited else []

    if trigger is Trigger.PAYMENT_DONE:
        c.state = CustomerState.LEFT
        c.outcome = Outcome.PURCHASED
        return [Action.DEPART]

    if trigger is Trigger.REFUND_ASSIGNED:
        waited = state is CustomerState.WAITING_FOR_REFUND
        c.state = CustomerState.REFUND_PROCESSING
        return [Action.CANCEL_PATIENCE] if waited else []

    # REFUND_RESOLVED
    c.state = CustomerState.LEFT
    c.outcome = Outcome.REFUND_DONE
    return [Action.DEPART]


def refund_routing(levers: PracticeLevers, rng: RngStream) -> RefundHandler:
    """Empowered cashiers settle refunds themselves, otherwise refer out."""
    if rng.bernoulli(levers.empowerment):
        return RefundHandler.CASHIER_AUTONOMOUS
    return RefundHandler.REFER_TO_EXPERT


def refund_decision(
    handler: RefundHandler,
    rng: RngStream,
    cashier_approval: float = 0.8,
    expert_approval: float = 0.7,
) -> bool:
    """Approve or deny; cashiers wave through more claims than experts."""
    rate = cashier_approval if handler is RefundHandler.CASHIER_AUTONOMOUS else expert_approval
    return bool(rng.bernoulli(rate))


def learning_episode(normal: Staff, expert: Staff, levers: PracticeLevers, rng: RngStream) -> bool:
    """Decide whether the referring seller stays to observe the expert.

    Only called at the moment an expert takes over a request that was
    beyond the normal seller's level; returns True when the seller stays
    (occupying them for the expert's full service and earning knowledge
    points when the service completes).
    """
    if normal.role is not StaffRole.NORMAL_SELLER:
        raise ModelBug(f"learning episode host {normal.id} is {normal.role.value}, not a normal seller")
    if expert.role is not StaffRole.EXPERT_SELLER:
        raise ModelBug(f"learning episode expert {expert.id} is {expert.role.value}")
    return bool(rng.bernoulli(levers.empower_to_learn))


def promotion_check(s: Staff, levers: PracticeLevers) -> bool:
    """Promote a normal seller to expert once knowledge reaches the trigger.

    Promotion is irreversible; returns True only when it happens on this
    call.
    """
    if s.role is not StaffRole.NORMAL_SELLER:
        return False
    if s.knowledge_points >= levers.promotion_trigger_point:
        s.role = StaffRole.EXPERT_SELLER
        return True
    return False


def staff_begin(s: Staff, task, t: float) -> None:
    if s.current_task is not None:
        raise DoubleAssign(f"staff {s.id} already on {s.current_task!r} at t={t}")
    s.current_task = task
    s.task_started_at = t


def staff_end(s: Staff, t: float) -> None:
    if s.current_task is None:
        raise EndWhileIdle(f"staff {s.id} has no task to end at t={t}")
    s.busy_minutes += t - s.task_started_at
    s.current_task = None
