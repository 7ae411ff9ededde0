"""Wire-time budget model: fixed per-transaction overhead plus per-byte cost."""

import random

import pytest

from servostack.loop.budget import (
    BusBudgetModel,
    PlannedTransaction,
    baseline_plan,
    duplicate_current_read_plan,
    goal_write_bytes,
    per_servo_read_bytes,
    telemetry_read_bytes,
)


@pytest.fixture
def model():
    return BusBudgetModel()


class TestCostArithmetic:
    def test_budget_line_is_80_percent_of_the_period(self, model):
        assert model.budget_ms == pytest.approx(16.0)

    def test_single_transaction_cost(self, model):
        assert model.transaction_ms(0) == pytest.approx(2.5)
        assert model.transaction_ms(100) == pytest.approx(3.5)

    def test_empty_plan_passes_at_zero(self, model):
        verdict = model.check([])
        assert verdict.ok
        assert verdict.predicted_ms == 0
        assert verdict.label == "PASS"

    def test_two_transactions_sixty_bytes(self, model):
        plan = [PlannedTransaction("sync_read", 30), PlannedTransaction("sync_write", 30)]
        verdict = model.check(plan)
        assert verdict.predicted_ms == pytest.approx(5.6)
        assert verdict.ok

    def test_seven_transactions_four_hundred_bytes(self, model):
        sizes = [50, 50, 60, 60, 60, 60, 60]
        plan = [PlannedTransaction("read", s) for s in sizes]
        verdict = model.check(plan)
        assert verdict.predicted_ms == pytest.approx(21.5)
        assert not verdict.ok
        assert verdict.label == "FAIL"

    def test_boundary_is_pass_at_budget_fail_above(self, model):
        # 2 txn overhead (5.0) + 1100 bytes (11.0) lands exactly on the line
        at_line = [PlannedTransaction("read", 550), PlannedTransaction("read", 550)]
        assert model.check(at_line).ok
        over = [PlannedTransaction("read", 550), PlannedTransaction("read", 551)]
        assert not model.check(over).ok


class TestWireSizes:
    def test_telemetry_sync_read_seven_servos(self):
        # request 6+2+7 = 15, each reply 6+15 = 21, total 15 + 7*21 = 162
        assert telemetry_read_bytes(7) == 162

    def test_goal_sync_write_seven_servos(self):
        # 6 + 2 + 7*(1+2) = 29, no replies
        assert goal_write_bytes(7) == 29

    def test_per_servo_current_read(self):
        # 2-byte read: request 6+2 = 8, reply 6+2 = 8
        assert per_servo_read_bytes() == 16


class TestReferencePlans:
    def test_baseline_seven_servo_arm_passes(self, model):
        verdict = model.check(baseline_plan(7))
        assert verdict.transactions == 2
        assert verdict.total_bytes == 162 + 29
        assert verdict.predicted_ms == pytest.approx(6.91)
        assert verdict.ok

    def test_ten_servo_bus_still_passes(self, model):
        verdict = model.check(baseline_plan(10))
        assert verdict.total_bytes == 228 + 38
        assert verdict.predicted_ms == pytest.approx(7.66)
        assert verdict.ok

    def test_duplicate_per_servo_current_reads_blow_the_budget(self, model):
        verdict = model.check(duplicate_current_read_plan(7))
        assert verdict.transactions == 9
        assert verdict.predicted_ms == pytest.approx(25.53)
        assert not verdict.ok

    def test_adding_transactions_never_lowers_the_cost(self, model):
        rng = random.Random(0xB0D6)
        for _ in range(200):
            plan = [
                PlannedTransaction("read", rng.randrange(0, 300))
                for _ in range(rng.randrange(0, 8))
            ]
            extended = plan + [PlannedTransaction("read", rng.randrange(0, 300))]
            assert model.predict_ms(extended) >= model.predict_ms(plan) + 2.5 - 1e-12

    def test_duplicating_reads_on_a_passing_plan_fails_it(self, model):
        passing = baseline_plan(7)
        assert model.check(passing).ok
        assert not model.check(duplicate_current_read_plan(7)).ok
