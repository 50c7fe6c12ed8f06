"""Deterministic discrete-event kernel and reproducible random streams.

Time is a real number of minutes since the start of the run (closed hours
are not simulated, so the clock advances through opening time only).  The
future-event list is a binary heap ordered by (time, seq); ``seq`` is a
monotone tiebreaker so that equal-time events fire in scheduling order and
replays are stable.
"""

from __future__ import annotations

import enum
import hashlib
import heapq
import random
from typing import Callable

from .errors import BadDistributionParams, PastEvent

SimTime = float


class EventKind(enum.Enum):
    ARRIVAL = "Arrival"
    BROWSE_DONE = "BrowseDone"
    PATIENCE_EXPIRED = "PatienceExpired"
    SERVICE_DONE = "ServiceDone"
    SHIFT_TICK = "ShiftTick"
    HORIZON_REACHED = "HorizonReached"


class Event:
    """A scheduled occurrence; doubles as its own cancellation handle."""

    __slots__ = ("time", "seq", "kind", "target", "payload", "fired", "cancelled")

    def __init__(self, time: SimTime, seq: int, kind: EventKind, target=None, payload=None):
        self.time = time
        self.seq = seq
        self.kind = kind
        self.target = target
        self.payload = payload
        self.fired = False
        self.cancelled = False

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"Event({self.kind.value}@{self.time:.3f}#{self.seq})"


class Kernel:
    """Single-threaded event loop with exact bookkeeping.

    One handler per event kind is registered by the world before the run.
    The kernel never shares mutable state between instances, so whole
    replications can run in parallel processes safely.
    """

    def __init__(self):
        self._now: SimTime = 0.0
        self._seq = 0
        self._heap: list[tuple[SimTime, int, Event]] = []
        self._handlers: dict[EventKind, Callable[[Event], None]] = {}
        self.scheduled_count = 0
        self.fired_count = 0
        self.cancelled_count = 0

    def now(self) -> SimTime:
        return self._now

    def on(self, kind: EventKind, handler: Callable[[Event], None]) -> None:
        self._handlers[kind] = handler

    def schedule(self, time: SimTime, kind: EventKind, target=None, payload=None) -> Event:
        """Insert an event at ``time`` and return its handle."""
        if time < self._now:
            raise PastEvent(f"cannot schedule {kind.value} at {time} before clock {self._now}")
        ev = Event(time, self._seq, kind, target, payload)
        self._seq += 1
        self.scheduled_count += 1
        heapq.heappush(self._heap, (time, ev.seq, ev))
        return ev

    def cancel(self, handle: Event) -> bool:
        """Mark an event inert; True iff it had not fired or been cancelled."""
        if handle.fired or handle.cancelled:
            return False
        handle.cancelled = True
        self.cancelled_count += 1
        return True

    def pending_count(self) -> int:
        """Live (unfired, uncancelled) events still in the list."""
        return sum(1 for _, _, ev in self._heap if not ev.cancelled)

    def run_until(self, horizon: SimTime) -> int:
        """Fire all events with time <= horizon in (time, seq) order.

        Returns the number of events fired (cancelled ones are skipped and
        do not count).  The clock ends exactly at ``horizon``.
        """
        if horizon < self._now:
            raise PastEvent(f"horizon {horizon} before clock {self._now}")
        heap = self._heap
        handlers = self._handlers
        fired = 0
        while heap and heap[0][0] <= horizon:
            _, _, ev = heapq.heappop(heap)
            if ev.cancelled:
                continue
            self._now = ev.time
            ev.fired = True
            fired += 1
            handlers[ev.kind](ev)
        self._now = horizon
        self.fired_count += fired
        return fired


def _derive_seed(master_seed: int, name: str) -> int:
    digest = hashlib.sha256(f"{master_seed}/{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "big")


class RngStream:
    """One named substream: identical (master seed, name) -> identical draws."""

    __slots__ = ("name", "_rng")

    def __init__(self, master_seed: int, name: str):
        self.name = name
        self._rng = random.Random(_derive_seed(master_seed, name))

    def random(self) -> float:
        return self._rng.random()

    def exponential(self, mean: float) -> float:
        if mean <= 0:
            raise BadDistributionParams(f"exponential mean must be > 0, got {mean}")
        return self._rng.expovariate(1.0 / mean)

    def uniform(self, a: float, b: float) -> float:
        if a > b:
            raise BadDistributionParams(f"uniform needs a <= b, got ({a}, {b})")
        return self._rng.uniform(a, b)

    def triangular(self, a: float, m: float, b: float) -> float:
        if not (a <= m <= b):
            raise BadDistributionParams(f"triangular needs a <= m <= b, got ({a}, {m}, {b})")
        return self._rng.triangular(a, b, m)

    def bernoulli(self, p: float) -> int:
        if not 0.0 <= p <= 1.0:
            raise BadDistributionParams(f"bernoulli p must be in [0, 1], got {p}")
        if p >= 1.0:
            return 1
        return 1 if self._rng.random() < p else 0

    def sample(self, dist: tuple) -> float:
        """Draw from a distribution spec tuple, e.g. ("triangular", 1, 3, 8)."""
        kind, *params = dist
        if kind == "exponential":
            return self.exponential(*params)
        if kind == "uniform":
            return self.uniform(*params)
        if kind == "triangular":
            return self.triangular(*params)
        if kind == "bernoulli":
            return float(self.bernoulli(*params))
        raise BadDistributionParams(f"unknown distribution kind {kind!r}")


class RngHub:
    """Factory for mutually independent named streams under one master seed.

    Substream states are derived by hashing (master seed, stream name) with
    SHA-256, so streams never overlap by construction and adding draws to
    one stream cannot perturb another.
    """

    def __init__(self, master_seed: int):
        self.master_seed = master_seed
        self._streams: dict[str, RngStream] = {}

    def stream(self, name: str) -> RngStream:
        st = self._streams.get(name)
        if st is None:
            st = RngStream(self.master_seed, name)
            self._streams[name] = st
        return st


def derive_replication_seed(master_seed: int, level: object, rep_index: int) -> int:
    """Stable per-replication master seed from (sweep seed, level, index)."""
    digest = hashlib.sha256(f"{master_seed}|{level!r}|{rep_index}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
