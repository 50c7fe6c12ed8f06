import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retailsim.engine import EventKind, Kernel, RngHub, RngStream, derive_replication_seed
from retailsim.errors import BadDistributionParams, PastEvent


def make_kernel(record=None):
    k = Kernel()
    fired = [] if record is None else record
    for kind in EventKind:
        k.on(kind, lambda ev, fired=fired: fired.append((ev.time, ev.seq, ev.kind)))
    return k, fired


class TestSchedule:
    def test_boundary_time_equal_to_now_accepted(self):
        k, fired = make_kernel()
        k.schedule(0.0, EventKind.ARRIVAL)
        k.run_until(1.0)
        assert len(fired) == 1

    def test_event_fires_at_its_time(self):
        k, fired = make_kernel()
        k.schedule(5.0, EventKind.ARRIVAL)
        k.run_until(10.0)
        assert fired == [(5.0, 0, EventKind.ARRIVAL)]

    def test_equal_time_events_fire_in_schedule_order(self):
        k, fired = make_kernel()
        k.schedule(2.0, EventKind.ARRIVAL)
        k.schedule(2.0, EventKind.BROWSE_DONE)
        k.schedule(2.0, EventKind.SERVICE_DONE)
        k.run_until(3.0)
        assert [f[1] for f in fired] == [0, 1, 2]
        assert [f[2] for f in fired] == [
            EventKind.ARRIVAL,
            EventKind.BROWSE_DONE,
            EventKind.SERVICE_DONE,
        ]

    def test_past_event_rejected(self):
        k, _ = make_kernel()
        k.schedule(1.0, EventKind.ARRIVAL)
        k.run_until(5.0)
        with pytest.raises(PastEvent):
            k.schedule(4.0, EventKind.ARRIVAL)


class TestCancel:
    def test_cancel_before_fire(self):
        k, fired = make_kernel()
        handle = k.schedule(1.0, EventKind.ARRIVAL)
        assert k.cancel(handle) is True
        k.run_until(2.0)
        assert fired == []

    def test_cancel_after_fire_returns_false(self):
        k, _ = make_kernel()
        handle = k.schedule(1.0, EventKind.ARRIVAL)
        k.run_until(2.0)
        assert k.cancel(handle) is False

    def test_double_cancel_returns_false(self):
        k, _ = make_kernel()
        handle = k.schedule(1.0, EventKind.ARRIVAL)
        assert k.cancel(handle) is True
        assert k.cancel(handle) is False


class TestRunUntil:
    def test_empty_list_advances_clock(self):
        k, fired = make_kernel()
        assert k.run_until(100.0) == 0
        assert k.now() == 100.0
        assert fired == []

    def test_horizon_cuts_off_later_events(self):
        k, fired = make_kernel()
        for t in (1.0, 2.0, 3.0):
            k.schedule(t, EventKind.ARRIVAL)
        assert k.run_until(2.0) == 2
        assert len(fired) == 2
        assert k.now() == 2.0

    def test_clock_monotone_over_processed_events(self):
        k, fired = make_kernel()
        import random

        rng = random.Random(7)
        for _ in range(200):
            k.schedule(rng.uniform(0, 50), EventKind.ARRIVAL)
        k.run_until(50.0)
        times = [f[0] for f in fired]
        assert times == sorted(times)


@given(
    st.lists(st.tuples(st.floats(0, 100), st.booleans()), max_size=60),
    st.floats(0, 100),
)
@settings(max_examples=50, deadline=None)
def test_fel_conservation(events, horizon):
    """scheduled == fired + cancelled + still pending, exactly."""
    k, fired = make_kernel()
    handles = []
    for t, do_cancel in events:
        handles.append((k.schedule(t, EventKind.ARRIVAL), do_cancel))
    for handle, do_cancel in handles:
        if do_cancel:
            k.cancel(handle)
    k.run_until(horizon)
    pending = k.pending_count()
    assert k.scheduled_count == len(fired) + k.cancelled_count + pending


class TestStreams:
    def test_same_seed_and_name_identical(self):
        a = RngStream(123, "arrivals")
        b = RngStream(123, "arrivals")
        assert [a.random() for _ in range(50)] == [b.random() for _ in range(50)]

    def test_different_names_differ(self):
        a = RngStream(123, "arrivals")
        b = RngStream(123, "browsing")
        assert [a.random() for _ in range(10)] != [b.random() for _ in range(10)]

    def test_stream_isolation(self):
        hub1 = RngHub(99)
        hub2 = RngHub(99)
        b1 = hub1.stream("b")
        # Interleave draws on stream a in hub1 only.
        a1 = hub1.stream("a")
        seq1 = []
        for _ in range(20):
            a1.random()
            seq1.append(b1.random())
        b2 = hub2.stream("b")
        seq2 = [b2.random() for _ in range(20)]
        assert seq1 == seq2

    def test_replication_seed_derivation_distinct(self):
        seeds = {
            derive_replication_seed(42, level, rep)
            for level in (0.0, 0.5, 1.0)
            for rep in range(10)
        }
        assert len(seeds) == 30


class TestDistributions:
    def test_bernoulli_degenerate(self):
        s = RngStream(1, "x")
        assert all(s.bernoulli(0.0) == 0 for _ in range(100))
        assert all(s.bernoulli(1.0) == 1 for _ in range(100))

    def test_exponential_mean_matches_arrival_spacing(self):
        # 70 customers per hour -> mean interarrival 60/70 minutes.
        s = RngStream(2024, "arrivals")
        n = 10**6
        mean = sum(s.exponential(60.0 / 70.0) for _ in range(n)) / n
        assert math.isclose(mean, 60.0 / 70.0, abs_tol=0.01)

    def test_triangular_mean(self):
        s = RngStream(7, "t")
        n = 10**6
        mean = sum(s.triangular(1, 3, 8) for _ in range(n)) / n
        assert math.isclose(mean, 4.0, abs_tol=0.05)

    def test_bad_params_rejected(self):
        s = RngStream(1, "x")
        with pytest.raises(BadDistributionParams):
            s.exponential(0.0)
        with pytest.raises(BadDistributionParams):
            s.triangular(3, 2, 5)
        with pytest.raises(BadDistributionParams):
            s.uniform(4, 1)
        with pytest.raises(BadDistributionParams):
            s.bernoulli(1.5)
        with pytest.raises(BadDistributionParams):
            s.sample(("gaussian", 0, 1))

    def test_sample_dispatch(self):
        s = RngStream(5, "y")
        assert 1 <= s.sample(("triangular", 1, 3, 8)) <= 8
        assert 2 <= s.sample(("uniform", 2, 4)) <= 4
        assert s.sample(("exponential", 1.0)) >= 0
        assert s.sample(("bernoulli", 0.5)) in (0.0, 1.0)
