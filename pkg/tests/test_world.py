import dataclasses
import random

import pytest

from retailsim.agents import StaffRole
from retailsim.config import ScenarioConfig, default_config
from retailsim.world import Department, run_world


def small_config(**overrides):
    cfg = default_config()
    base = dataclasses.replace(cfg, horizon_weeks=0.05, master_seed=7)
    return dataclasses.replace(base, **overrides) if overrides else base


def outcome_tuple(out):
    return tuple(getattr(out, name) for name in out.field_names())


class TestConservation:
    def test_every_customer_accounted_for(self):
        dept = Department(small_config())
        out = dept.run()
        exits = sum(dept.ledger.left.values())
        assert out.entered == exits + out.in_system_at_horizon
        assert out.in_system_at_horizon >= 0

    def test_exit_counts_match_outcome_split(self):
        dept = Department(small_config(horizon_weeks=0.1))
        dept.run()
        assert sum(dept.ledger.left.values()) <= dept.ledger.entered


class TestDeterminism:
    def test_same_seed_bit_identical(self):
        a = run_world(small_config(horizon_weeks=0.2))
        b = run_world(small_config(horizon_weeks=0.2))
        assert outcome_tuple(a) == outcome_tuple(b)

    def test_different_seed_differs(self):
        a = run_world(small_config(horizon_weeks=0.2))
        b = run_world(small_config(horizon_weeks=0.2), master_seed=999)
        assert outcome_tuple(a) != outcome_tuple(b)


class TestUtilizationBounds:
    def test_utilizations_within_unit_interval(self):
        dept = Department(small_config(horizon_weeks=0.2))
        dept.run()
        horizon = dept.horizon
        for s in dept.staff:
            assert 0.0 <= s.busy_minutes <= horizon + 1e-9

    def test_section_manager_stays_idle(self):
        dept = Department(small_config(horizon_weeks=0.2))
        dept.run()
        managers = [s for s in dept.staff if s.role is StaffRole.SECTION_MANAGER]
        assert managers and all(s.busy_minutes == 0.0 for s in managers)


class TestMetricsConsistency:
    def test_weighted_sum_identity_end_to_end(self):
        dept = Department(small_config(horizon_weeks=0.3))
        out = dept.run()
        overall, refund = dept.ledger.recompute_satisfaction()
        assert overall == pytest.approx(out.overall_satisfaction, abs=1e-6)
        assert refund == pytest.approx(out.refund_satisfaction, abs=1e-6)

    def test_transactions_cross_check_against_cashier_task_log(self):
        dept = Department(small_config(horizon_weeks=0.3))
        out = dept.run()
        assert out.transactions == dept.ledger.cashier_payment_tasks
        from retailsim.agents import Outcome

        assert out.transactions == dept.ledger.left[Outcome.PURCHASED]

    def test_zero_arrivals_yields_empty_outcome(self):
        cfg = small_config(arrival_rate_per_hour=1e-9)
        out = run_world(cfg)
        assert out.entered == 0
        assert out.transactions == 0
        assert out.overall_satisfaction == 0.0
        assert out.normal_utilization == 0.0
        assert out.expert_utilization == 0.0


class TestRandomConfigInvariants:
    """Smaller version of the acceptance sweep: random worlds stay sound."""

    @pytest.mark.parametrize("trial", range(10))
    def test_random_config_invariants(self, trial):
        rng = random.Random(trial)
        p_help = rng.uniform(0.1, 0.5)
        p_till = rng.uniform(0.1, 1.0 - p_help - 0.05)
        profile_overrides = {
            "p_help": p_help,
            "p_direct_till": p_till,
            "p_leave_after_browse": 1.0 - p_help - p_till,
            "p_refund_visit": rng.uniform(0.0, 0.15),
            "expert_need_fraction": rng.uniform(0.0, 0.5),
            "p_rebrowse_while_waiting": rng.uniform(0.0, 0.5),
            "p_till_after_help": rng.uniform(0.0, 1.0),
        }
        cfg = default_config()
        profile = dataclasses.replace(cfg.profile, **profile_overrides)
        staffing = dataclasses.replace(
            cfg.staffing,
            cashiers=rng.randint(1, 4),
            normal_sellers=rng.randint(1, 8),
            expert_sellers=rng.randint(0, 3),
        )
        levers = dataclasses.replace(
            cfg.levers,
            empowerment=rng.random(),
            empower_to_learn=rng.random(),
            competence_threshold=rng.random(),
        )
        cfg = dataclasses.replace(
            cfg,
            horizon_weeks=0.08,
            arrival_rate_per_hour=rng.uniform(20, 90),
            master_seed=trial,
            profile=profile,
            staffing=staffing,
            levers=levers,
            queue_discipline=rng.choice(["longest-wait-first", "need-priority"]),
        )
        cfg.validate()
        dept = Department(cfg)
        out = dept.run()
        # Conservation, bounds, identity: the never-break set.
        assert out.entered == sum(dept.ledger.left.values()) + out.in_system_at_horizon
        for s in dept.staff:
            assert 0.0 <= s.busy_minutes <= dept.horizon + 1e-9
        overall, refund = dept.ledger.recompute_satisfaction()
        assert overall == pytest.approx(out.overall_satisfaction, abs=1e-6)
        assert refund == pytest.approx(out.refund_satisfaction, abs=1e-6)
        # Knowledge never decreases and promotions line up with the trigger.
        trigger = cfg.levers.promotion_trigger_point
        for s in dept.staff:
            if s.birth_role is StaffRole.NORMAL_SELLER:
                if s.role is StaffRole.EXPERT_SELLER:
                    assert s.knowledge_points >= trigger
                else:
                    assert s.knowledge_points < trigger


class TestBehavioralResponses:
    def test_halving_staff_increases_reneging(self):
        """Paired-seed comparison: fewer staff, strictly more abandonment."""
        cfg_full = small_config(horizon_weeks=0.4)
        cfg_half = dataclasses.replace(
            cfg_full,
            staffing=dataclasses.replace(
                cfg_full.staffing, cashiers=1, normal_sellers=3, expert_sellers=1
            ),
        )
        out_full = run_world(cfg_full)
        out_half = run_world(cfg_half)
        reneges_full = out_full.renege_help + out_full.renege_till + out_full.renege_refund
        reneges_half = out_half.renege_help + out_half.renege_till + out_half.renege_refund
        assert reneges_half > reneges_full

    def test_infinite_patience_eliminates_reneging(self):
        cfg = small_config(horizon_weeks=0.2)
        profile = dataclasses.replace(
            cfg.profile,
            patience_help_mean=1e9,
            patience_till_mean=1e9,
            patience_refund_mean=1e9,
        )
        out = run_world(dataclasses.replace(cfg, profile=profile))
        assert out.renege_help == 0
        assert out.renege_till == 0
        assert out.renege_refund == 0

    def test_tiny_patience_causes_immediate_reneging(self):
        cfg = small_config(horizon_weeks=0.2)
        profile = dataclasses.replace(
            cfg.profile,
            patience_help_mean=1e-3,
            patience_till_mean=1e-3,
            patience_refund_mean=1e-3,
            p_rebrowse_while_waiting=0.0,
        )
        staffing = dataclasses.replace(cfg.staffing, cashiers=1, normal_sellers=1, expert_sellers=1)
        out = run_world(dataclasses.replace(cfg, profile=profile, staffing=staffing))
        assert out.renege_till + out.renege_help + out.renege_refund > 0

    def test_learning_episodes_require_the_lever(self):
        cfg = small_config(horizon_weeks=0.4)
        levers_off = dataclasses.replace(cfg.levers, empower_to_learn=0.0)
        out_off = run_world(dataclasses.replace(cfg, levers=levers_off))
        assert out_off.learning_episodes == 0
        assert out_off.mean_normal_expertise == 0.0
        levers_on = dataclasses.replace(cfg.levers, empower_to_learn=1.0)
        out_on = run_world(dataclasses.replace(cfg, levers=levers_on))
        assert out_on.learning_episodes > 0

    def test_refund_handling_splits_by_empowerment(self):
        cfg = small_config(horizon_weeks=0.4)
        levers = dataclasses.replace(cfg.levers, empowerment=0.0)
        out0 = run_world(dataclasses.replace(cfg, levers=levers))
        # Without empowerment every handled refund goes through a referral
        # (started-but-unfinished ones at the horizon explain any excess).
        assert out0.refunds_processed > 0
        assert out0.refunds_referred >= out0.refunds_processed
        levers1 = dataclasses.replace(cfg.levers, empowerment=1.0)
        out1 = run_world(dataclasses.replace(cfg, levers=levers1))
        assert out1.refunds_processed > 0
        assert out1.refunds_referred == 0


class TestEventAccounting:
    def test_fel_conservation_full_run(self):
        dept = Department(small_config(horizon_weeks=0.3))
        dept.run()
        k = dept.kernel
        assert k.scheduled_count == k.fired_count + k.cancelled_count + k.pending_count()

    def test_event_volume_scales_with_arrivals(self):
        """A run fires a small multiple of the expected arrival count."""
        cfg = small_config(horizon_weeks=0.5)
        dept = Department(cfg)
        dept.run()
        expected_arrivals = cfg.arrival_rate_per_hour * cfg.horizon_weeks * 7 * 8
        assert expected_arrivals * 2 < dept.kernel.fired_count < expected_arrivals * 12
