"""Servo physics: unit conversions, free motion, contact, protection, wear.

Expected values are frozen from hand-computed chains (pad spring, motor
constant, telemetry scale) so regressions in any link show up as a numeric
mismatch, not just a changed trend.
"""

import math

import pytest

from servostack.bus.registers import CURRENT_SCALE_A, load_register_map
from servostack.sim import (
    CONTACT_MADE,
    FIRMWARE_TRIP,
    GEAR_FAILURE,
    FreeLoad,
    GripperContactModel,
    INTERNAL_DT,
    LiftLoadModel,
    SimBus,
    damage_rate,
    gripper_contact_current,
    lift_holding_current,
    stall_current_raw,
    time_to_failure,
)

REGMAP = load_register_map()


def make_bus(**kwargs):
    return SimBus("test", REGMAP, **kwargs)


def enabled_servo(bus, servo_id=1, load=None, position=2048):
    servo = bus.add_servo(servo_id, load=load, initial_position=position)
    servo.regs.set("Torque_Enable", 1)
    return servo


def run_until(bus, predicate, limit_s=10.0):
    steps = round(limit_s / INTERNAL_DT)
    for _ in range(steps):
        bus.step()
        if predicate():
            return bus.now
    raise AssertionError(f"condition not reached within {limit_s}s")


class TestConversionOracles:
    def test_fingertip_travel_per_tick(self):
        # 3 cm lever: 60*pi mm of tip travel per 4096-tick revolution
        model = GripperContactModel()
        assert model.mm_per_tick == pytest.approx(60.0 * math.pi / 4096.0, abs=1e-9)
        assert model.mm_per_tick == pytest.approx(0.0460194, abs=1e-6)

    def test_squeeze_current_per_mm(self):
        # 3 N/mm pad -> kgf -> kg*cm at the 3 cm lever -> A -> raw
        model = GripperContactModel()
        expected = 3.0 / 9.81 * 3.0 / 10.0 / CURRENT_SCALE_A
        assert model.raw_per_mm == pytest.approx(expected, rel=1e-12)
        assert model.raw_per_mm == pytest.approx(14.1143, abs=1e-3)

    def test_two_mm_squeeze_reading(self):
        assert gripper_contact_current(2.0) == pytest.approx(48.2287, abs=1e-3)

    def test_depth_that_saturates_the_estimator(self):
        # 70 raw above the floor is full scale for the force estimate
        model = GripperContactModel()
        assert model.depth_for_current_raw(70.0) == pytest.approx(4.9595, abs=1e-3)

    def test_lift_holding_current_one_kg(self):
        raw = lift_holding_current(1.0)
        assert raw == pytest.approx(1.3610, abs=2e-3)
        assert raw < 3.0  # buried in the friction floor, invisible to telemetry

    def test_stall_current_raw(self):
        assert stall_current_raw() == pytest.approx(2.7 / 0.0065, rel=1e-12)

    def test_damage_oracle(self):
        assert damage_rate(1.8) == 0.0
        assert damage_rate(1.0) == 0.0
        assert time_to_failure(2.7) == pytest.approx(3.0, rel=1e-12)
        assert time_to_failure(0.5) == math.inf


class TestFreeMotion:
    def test_tracks_goal_at_programmed_speed(self):
        bus = make_bus(seed=3)
        servo = enabled_servo(bus, position=1024)
        servo.regs.set("Goal_Speed", 1000)
        servo.regs.set("Goal_Position", 2048)
        t = run_until(bus, lambda: servo.position >= 2048, limit_s=2.0)
        # 1024 ticks at 1000 ticks/s
        assert t == pytest.approx(1.024, abs=2 * INTERNAL_DT)
        assert servo.regs.get("Present_Position") == 2048

    def test_free_air_current_band(self):
        bus = make_bus(seed=11)
        servo = enabled_servo(bus, position=1024)
        servo.regs.set("Goal_Speed", 1000)
        servo.regs.set("Goal_Position", 2048)
        moving, resting = [], []
        for _ in range(round(1.5 / INTERNAL_DT)):
            bus.step()
            (moving if servo.position < 2048 else resting).append(abs(servo.current))
        assert moving and resting
        assert 12 <= min(moving) and max(moving) <= 18
        assert max(resting[5:]) <= 8  # floor redraw settles within a few steps

    def test_enable_does_not_lurch_to_stale_goal(self):
        bus = make_bus()
        servo = bus.add_servo(1, initial_position=2048)
        servo.regs.set("Goal_Position", 3000)
        bus.run(0.1)
        assert servo.position == 2048  # torque off, stale goal ignored
        servo.regs.set("Torque_Enable", 1)
        bus.step()
        # motion restarts from the present position, speed-profiled
        assert servo.position - 2048 <= 3400 * INTERNAL_DT + 1e-9

    def test_angle_limits_clamp_the_goal(self):
        bus = make_bus()
        servo = enabled_servo(bus)
        servo.regs.set("Min_Angle_Limit", 500)
        servo.regs.set("Max_Angle_Limit", 3500)
        servo.regs.set("Goal_Position", 4000)
        bus.run(1.5)
        assert servo.position == 3500
        assert abs(servo.current) <= 8  # settled, no residual drive

    def test_disabled_servo_reports_zero_current(self):
        bus = make_bus()
        servo = bus.add_servo(1)
        bus.run(0.2)
        assert servo.current == 0.0
        assert servo.regs.get("Present_Current") == 0


class TestBlockedShaft:
    def test_jam_ramps_current_to_torque_cap(self):
        bus = make_bus(seed=5)
        servo = enabled_servo(bus, position=2000)
        servo.jam_here(direction=1)
        servo.regs.set("Goal_Position", 3000)
        bus.run(0.5)
        cap = stall_current_raw()
        assert servo.position == 2000
        assert cap + 12 <= abs(servo.current) <= cap + 18

    def test_unprotected_jam_strips_gears_within_seconds(self):
        bus = make_bus(seed=5)
        servo = enabled_servo(bus, position=2000)
        servo.jam_here(direction=1)
        servo.regs.set("Goal_Position", 3000)
        t = run_until(bus, lambda: servo.gear_health == 0.0, limit_s=4.0)
        assert 2.0 < t < 3.5  # stall at ~2.8 A against a 3 s budget at 2.7 A
        assert any(e.kind == GEAR_FAILURE for e in bus.events)
        # a dead gear train drives nothing but still answers telemetry
        bus.run(0.1)
        assert servo.current == 0.0
        assert servo.regs.get("Present_Position") == 2000

    def test_jam_blocks_one_direction_only(self):
        bus = make_bus()
        servo = enabled_servo(bus, position=2000)
        servo.jam_here(direction=1)
        servo.regs.set("Goal_Position", 1500)
        bus.run(0.5)
        assert servo.position == 1500  # free to retreat


class TestGripperContact:
    def close_on_object(self, bus, torque_limit=None):
        load = GripperContactModel()
        servo = enabled_servo(bus, servo_id=6, load=load, position=1000)
        contact_aperture = load.aperture_mm(2000.0)
        servo.place_object(contact_aperture)
        if torque_limit is not None:
            servo.regs.set("Torque_Limit", torque_limit)
        servo.regs.set("Goal_Speed", 760)  # 35 mm/s at the fingertip
        servo.regs.set("Goal_Position", 3000)
        return servo, contact_aperture

    def test_contact_event_at_object_aperture(self):
        bus = make_bus(seed=9)
        servo, contact_aperture = self.close_on_object(bus)
        run_until(bus, lambda: servo._in_contact, limit_s=3.0)
        hits = [e for e in bus.events if e.kind == CONTACT_MADE]
        assert len(hits) == 1
        assert hits[0].servo_id == 6
        assert hits[0].detail["aperture_mm"] == pytest.approx(contact_aperture, abs=1e-3)
        assert servo.position == pytest.approx(2000.0, abs=2.0)

    def test_current_ramp_rate_after_contact(self):
        bus = make_bus(seed=9)
        servo, _ = self.close_on_object(bus)
        t_contact = run_until(bus, lambda: servo._in_contact, limit_s=3.0)
        t_90 = run_until(bus, lambda: abs(servo.current) >= 90.0, limit_s=1.0)
        # setpoint outruns the creeping shaft at ~710 ticks/s; with the
        # 0.70 raw/tick gain that is ~497 raw/s of ramp
        assert 0.10 <= t_90 - t_contact <= 0.20

    def test_reduced_torque_settles_at_spring_balance(self):
        bus = make_bus(seed=9)
        servo, _ = self.close_on_object(bus, torque_limit=200)
        bus.run(6.0)
        # cap = 200/1000 * stall; shaft creeps until the pad spring matches
        cap = 0.2 * stall_current_raw()
        depth_ticks = servo.position - 2000.0
        spring_per_tick = GripperContactModel().raw_per_mm * GripperContactModel().mm_per_tick
        assert depth_ticks == pytest.approx((cap - 0.5) / spring_per_tick, abs=2.0)
        assert cap + 12 - 1 <= abs(servo.current) <= cap + 18 + 1
        assert servo.gear_health == 1.0  # 0.66 A peak, far below damage

    def test_holding_current_stays_at_or_above_saturation(self):
        bus = make_bus(seed=9)
        servo, _ = self.close_on_object(bus, torque_limit=200)
        bus.run(6.0)
        for _ in range(100):
            bus.step()
            assert abs(servo.current) >= 90.0

    def test_opening_releases_contact(self):
        bus = make_bus(seed=9)
        servo, _ = self.close_on_object(bus, torque_limit=200)
        bus.run(3.0)
        assert servo._in_contact
        servo.regs.set("Goal_Position", 1200)
        bus.run(3.0)
        assert not servo._in_contact
        assert servo.position == 1200
        assert abs(servo.current) <= 8

    def test_removed_object_drops_contact_force(self):
        bus = make_bus(seed=9)
        servo, _ = self.close_on_object(bus, torque_limit=200)
        bus.run(3.0)
        servo.remove_object()
        bus.run(0.5)
        # nothing left to squeeze: the finger runs on toward the goal
        assert servo.position > 2200
        assert abs(servo.current) <= 18


class TestLift:
    def test_payload_holding_current_is_sub_floor(self):
        bus = make_bus(seed=2)
        servo = enabled_servo(bus, servo_id=11, load=LiftLoadModel(payload_mass_kg=1.0))
        bus.run(0.5)
        # 1 kg through the screw: ~1.36 raw on top of the rest floor
        assert abs(servo.current) <= 8 + 1.3610 + 1e-6

    def test_no_backdrive_when_disabled(self):
        bus = make_bus()
        servo = bus.add_servo(11, load=LiftLoadModel(payload_mass_kg=3.0), initial_position=3000)
        bus.run(1.0)
        assert servo.position == 3000


class TestFirmwareProtection:
    def provisioned(self, bus, pinned=450):
        servo = bus.add_servo(1)
        servo.regs.set("Protection_Current", 450)
        servo.regs.set("Over_Current_Protection_Time", 150)
        servo.pinned_current = pinned
        return servo

    def test_trip_time_matches_protection_window(self):
        bus = make_bus()
        servo = self.provisioned(bus)  # 450 raw = 2.925 A vs 1.8 A threshold
        t = run_until(bus, lambda: servo.firmware_trip, limit_s=3.0)
        assert t == pytest.approx(1.502, abs=2 * INTERNAL_DT)
        trips = [e for e in bus.events if e.kind == FIRMWARE_TRIP]
        assert len(trips) == 1 and trips[0].servo_id == 1

    def test_dipping_below_threshold_resets_the_clock(self):
        bus = make_bus()
        servo = self.provisioned(bus)
        bus.run(1.0)
        assert not servo.firmware_trip
        servo.pinned_current = 100  # 0.65 A, under the comparator
        bus.run(0.1)
        servo.pinned_current = 450
        bus.run(1.4)
        assert not servo.firmware_trip  # window restarted at 1.1 s
        bus.run(0.2)
        assert servo.firmware_trip

    def test_factory_defaults_leave_protection_off(self):
        bus = make_bus()
        servo = bus.add_servo(1)
        servo.pinned_current = 450
        bus.run(3.0)
        assert not servo.firmware_trip
        # and the unprotected stall chews through the gears instead
        assert any(e.kind == GEAR_FAILURE for e in bus.events)

    def test_power_cycle_clears_trip_but_not_wear(self):
        bus = make_bus()
        servo = self.provisioned(bus)
        run_until(bus, lambda: servo.firmware_trip, limit_s=3.0)
        health_before = servo.gear_health
        assert health_before < 1.0
        servo.pinned_current = None
        servo.power_cycle()
        assert not servo.firmware_trip
        assert servo.gear_health == health_before


class TestPowerCycleRegisters:
    def test_eeprom_persists_sram_reseeds(self):
        bus = make_bus()
        servo = bus.add_servo(1, initial_position=1500)
        regs = servo.regs
        regs.set("Protection_Current", 450)
        regs.set("Over_Current_Protection_Time", 150)
        regs.set("Max_Torque_Limit", 600)
        regs.set("Goal_Speed", 1000)
        regs.set("Torque_Limit", 250)
        regs.set("Torque_Enable", 1)
        servo.power_cycle()
        assert regs.get("Protection_Current") == 450
        assert regs.get("Over_Current_Protection_Time") == 150
        assert regs.get("Max_Torque_Limit") == 600
        assert regs.get("Goal_Speed") == 0
        assert regs.get("Torque_Enable") == 0
        assert regs.get("Torque_Limit") == 600  # reseeded from the EEPROM ceiling
        assert regs.get("Goal_Position") == 1500  # no lurch on wake
        assert regs.get("Lock") == 1
