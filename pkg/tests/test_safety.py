"""Protection layers: clamp maths, stall state machine, backstop provisioning."""

import random

import pytest

from servostack.bus import decode, encode
from servostack.bus.registers import load_register_map
from servostack.safety import (
    MONITORING,
    REDUCE_TORQUE,
    RESTORE_TORQUE,
    RETRY_FULL_TORQUE,
    RETRYING,
    STALLED,
    StallDetector,
    TORQUE_CEILING,
    build_provision_plan,
    clamp_goal,
    provision_servo,
)
from servostack.sim import SimBus
from servostack.sim.events import GRIPPER_STALL, JOINT_STALL

REGMAP = load_register_map()


class TestClampGoal:
    def test_bulk_random_pairs_stay_in_range(self):
        rng = random.Random(0xC1A)
        for _ in range(10_000):
            lo = rng.randint(0, 4095)
            hi = rng.randint(lo, 4095)
            goal = rng.randint(-2048, 6143)
            out = clamp_goal(goal, lo, hi)
            assert lo <= out <= hi
            assert out == clamp_goal(out, lo, hi)  # idempotent
            if lo <= goal <= hi:
                assert out == goal

    def test_edges(self):
        assert clamp_goal(0, 0, 4095) == 0
        assert clamp_goal(4095, 0, 4095) == 4095
        assert clamp_goal(-1, 100, 200) == 100
        assert clamp_goal(9999, 100, 200) == 200

    def test_inverted_limits_rejected(self):
        with pytest.raises(ValueError):
            clamp_goal(100, 300, 200)


def feed(detector, samples, goal=2500):
    """Run (position, current) samples through; returns the non-None actions."""
    actions = []
    for position, current in samples:
        action = detector.update(position, current, goal)
        if action is not None:
            actions.append(action)
    return actions


class TestGripperStall:
    def test_declares_on_full_window_and_reduces_torque(self):
        det = StallDetector(6, gripper=True)
        # approach: fast motion, low current
        assert feed(det, [(1000 + 15 * i, 15) for i in range(20)]) == []
        # contact: shaft pinned, current over threshold; first sample below
        # threshold seeds the position delta
        actions = feed(det, [(1300, 40)] + [(1300 + i, 95) for i in range(15)])
        assert len(actions) == 1
        assert actions[0].kind == REDUCE_TORQUE
        assert actions[0].torque_limit == 200
        assert actions[0].event == GRIPPER_STALL
        assert det.state == STALLED

    def test_fires_exactly_once_while_held(self):
        det = StallDetector(6, gripper=True)
        feed(det, [(1300, 40)] + [(1300, 95)] * 15)
        assert det.state == STALLED
        assert feed(det, [(1300, 96)] * 200) == []

    def test_window_counts_consecutive_ticks_only(self):
        det = StallDetector(6, gripper=True)
        samples = [(1300, 40)] + [(1300, 95)] * 14  # one short of a window
        samples += [(1350, 95)]  # 50 ticks of motion breaks the run
        samples += [(1350, 95)] * 14
        assert feed(det, samples) == []
        actions = feed(det, [(1350, 95)])
        assert len(actions) == 1  # the 15th consecutive quiet tick

    def test_current_dip_resets_the_run(self):
        det = StallDetector(6, gripper=True)
        samples = [(1300, 40)] + [(1300, 95)] * 14 + [(1300, 60)] + [(1300, 95)] * 14
        assert feed(det, samples) == []

    def test_new_goal_restores_torque(self):
        det = StallDetector(6, gripper=True)
        feed(det, [(1300, 40)] + [(1300, 95)] * 15)
        actions = feed(det, [(1300, 95)] * 5, goal=1000)
        assert actions[0].kind == RESTORE_TORQUE
        assert actions[0].torque_limit == 1000
        assert det.state == MONITORING

    def test_no_spontaneous_restore_when_load_vanishes(self):
        det = StallDetector(6, gripper=True)
        feed(det, [(1300, 40)] + [(1300, 95)] * 15)
        # object slipped: current collapses, position wanders
        assert feed(det, [(1300 + 5 * i, 8) for i in range(100)]) == []
        assert det.state == STALLED


class TestJointStall:
    def jam_samples(self, n, position=2200, current=300):
        return [(position, current)] * n

    def test_retry_then_back_off(self):
        det = StallDetector(2)
        actions = feed(det, [(2200, 40)] + self.jam_samples(15))
        assert [a.kind for a in actions] == [RETRY_FULL_TORQUE]
        assert actions[0].torque_limit == 1000
        assert actions[0].event == JOINT_STALL
        assert det.state == RETRYING
        # still jammed through a fresh window: give up and relax
        actions = feed(det, self.jam_samples(15))
        assert [a.kind for a in actions] == [REDUCE_TORQUE]
        assert actions[0].torque_limit == 100
        assert actions[0].event is None  # one event per stall episode
        assert det.state == STALLED

    def test_retry_that_frees_the_joint_goes_quiet(self):
        det = StallDetector(2)
        feed(det, [(2200, 40)] + self.jam_samples(15))
        assert det.state == RETRYING
        # retry shoved it through: motion resumes, current falls
        assert feed(det, [(2200 + 20 * i, 30) for i in range(50)]) == []
        assert det.state == RETRYING  # only a new goal re-arms monitoring

    def test_threshold_higher_than_gripper(self):
        det = StallDetector(2)
        assert feed(det, [(2200, 40)] + self.jam_samples(40, current=240)) == []

    def test_goal_change_mid_window_clears_the_run(self):
        det = StallDetector(2)
        feed(det, [(2200, 40)] + self.jam_samples(14))
        assert feed(det, self.jam_samples(14), goal=2600) == []
        actions = feed(det, self.jam_samples(1), goal=2600)
        assert len(actions) == 1  # window refilled under the new goal


class TestProvisioning:
    @pytest.fixture
    def bus(self):
        b = SimBus("right", REGMAP, seed=1)
        for servo_id in (1, 2, 3):
            b.add_servo(servo_id)
        return b

    def transactor(self, bus):
        def transact(packet):
            frames, _ = bus.transact(encode(packet))
            return decode(frames[0], expect="status") if frames else None

        return transact

    def test_plan_unlocks_burns_and_relocks(self):
        plan = build_provision_plan(REGMAP, 1)
        assert len(plan) == 5
        lock = REGMAP["Lock"]
        assert plan[0].params[0] == lock.address and plan[0].params[1] == 0
        assert plan[-1].params[0] == lock.address and plan[-1].params[1] == 1

    def test_provision_writes_and_verifies(self, bus):
        result = provision_servo(REGMAP, 1, self.transactor(bus))
        assert result.ok, result.reason
        regs = bus.servos[1].regs
        assert regs.get("Protection_Current") == 450
        assert regs.get("Over_Current_Protection_Time") == 150
        assert regs.get("Max_Torque_Limit") == TORQUE_CEILING
        assert regs.locked
        # the ceiling arms the active limit at the next boot, not before
        assert regs.get("Torque_Limit") == 1000
        bus.servos[1].power_cycle()
        assert regs.get("Torque_Limit") == TORQUE_CEILING

    def test_stuck_lock_is_caught_by_readback(self, bus):
        bus.servos[2].lock_stuck = True
        result = provision_servo(REGMAP, 2, self.transactor(bus))
        assert not result.ok
        assert "lock" in result.reason
        assert result.readback["Protection_Current"] == 0
        # factory state untouched
        assert bus.servos[2].regs.get("Max_Torque_Limit") == 1000

    def test_missing_servo_reports_no_response(self, bus):
        result = provision_servo(REGMAP, 9, self.transactor(bus))
        assert not result.ok
        assert result.reason == "no response"

    def test_six_transactions_per_servo(self, bus):
        before = len(bus.transactions)
        provision_servo(REGMAP, 3, self.transactor(bus))
        assert len(bus.transactions) - before == 6
