"""Quasi-static physics for one simulated bus servo.

The motor is modelled as a position tracker: in free air the shaft follows
the internal speed-profiled setpoint exactly, and whatever blocks it (pad
contact, an obstacle, a hard stop) turns the position error into drive
current at KP_RAW_PER_TICK, capped by the active Torque_Limit.  Against a
compliant pad the shaft still creeps a little, which is what the stall
detector ends up seeing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from servostack.bus.registers import CURRENT_SCALE_A, PROTECTION_CURRENT_SCALE_A

from .events import CONTACT_MADE, FIRMWARE_TRIP, GEAR_FAILURE, Event
from .loads import (
    FreeLoad,
    GripperContactModel,
    LiftLoadModel,
    damage_rate,
    stall_current_raw,
)
from .register_file import RegisterFile

INTERNAL_DT = 1.0 / 500.0  # physics substep; the loop samples at 1/50 s
HARD_STOP_MIN = 0
HARD_STOP_MAX = 4095

# Drive current per tick of position error, and the slow advance of a blocked
# shaft against a compliant pad.  Together with the closing tip speed these
# set the shape of the grasp current ramp.
KP_RAW_PER_TICK = 0.70
CREEP_TICKS_PER_S = 50.0
SPRING_HYSTERESIS_RAW = 0.5
FREE_SPEED_TICKS_S = 3400.0

# Friction floor bands, raw units.  Redrawn per motion segment with one unit
# of per-sample jitter on top, so free-air readings stay inside 0..18.
MOVING_FLOOR_RANGE = (12, 17)
REST_FLOOR_RANGE = (0, 7)


@dataclass
class SimServo:
    servo_id: int
    regs: RegisterFile
    load: object = field(default_factory=FreeLoad)
    rng: random.Random = field(default_factory=lambda: random.Random(0))

    position: float = 2048.0
    velocity: float = 0.0
    current: float = 0.0  # signed, raw units
    gear_health: float = 1.0
    firmware_trip: bool = False

    # scenario hooks
    jam_position: float | None = None
    jam_direction: int = 1
    pinned_current: float | None = None
    lock_stuck: bool = False

    def __post_init__(self):
        self.position = float(self.regs.get("Present_Position"))
        self._cmd = self.position
        self._over_current_steps = 0
        self._in_contact = False
        self._contact_position = 0.0
        self._was_enabled = False
        self._driven = False
        self._floor_base = self.rng.randint(*REST_FLOOR_RANGE)
        self._reg_cache_stamp = -1
        self._ctrl = (0, 2048, 0, 1000, 4095, 0, 0, 0)

    # --- scenario controls ---

    def place_object(self, contact_aperture_mm: float) -> None:
        if not isinstance(self.load, GripperContactModel):
            raise ValueError(f"servo {self.servo_id} has no gripper load")
        self.load.contact_aperture_mm = contact_aperture_mm
        contact_pos = self.load.position_at_aperture(contact_aperture_mm)
        if self.position >= contact_pos:
            # already touching: zero-depth contact at the current position
            self._contact_position = self.position
            self._in_contact = True
        else:
            self._in_contact = False

    def remove_object(self) -> None:
        """Object gone (slipped or taken); contact force vanishes."""
        if isinstance(self.load, GripperContactModel):
            self.load.contact_aperture_mm = None
        if self._in_contact:
            # motion re-profiles from here instead of leaping to the setpoint
            self._cmd = self.position
        self._in_contact = False

    def jam_here(self, direction: int = 1) -> None:
        self.jam_position = self.position
        self.jam_direction = 1 if direction >= 0 else -1

    def clear_jam(self) -> None:
        self.jam_position = None

    def power_cycle(self) -> None:
        self.regs.power_cycle(int(round(self.position)))
        self.firmware_trip = False
        self._over_current_steps = 0
        self._cmd = self.position
        self._reg_cache_stamp = -1

    # --- stepping ---

    def _control_registers(self):
        stamp = self.regs.mutation_count
        if stamp != self._reg_cache_stamp:
            r = self.regs
            self._ctrl = (
                r.get("Torque_Enable"),
                r.get("Goal_Position"),
                abs(r.get("Goal_Speed")),
                r.get("Torque_Limit"),
                r.get("Max_Angle_Limit"),
                r.get("Min_Angle_Limit"),
                r.get("Protection_Current"),
                r.get("Over_Current_Protection_Time"),
            )
            self._reg_cache_stamp = stamp
        return self._ctrl

    def step(self, dt: float, now: float, events: list[Event]) -> None:
        (enable, goal, speed, torque_limit, max_angle, min_angle, prot, ocpt) = (
            self._control_registers()
        )
        enabled = bool(enable) and not self.firmware_trip and self.gear_health > 0.0
        if enabled and not self._was_enabled:
            self._cmd = self.position  # no lurch on enable
        self._was_enabled = enabled

        old_position = self.position
        load_current = 0.0

        if enabled:
            # firmware-side angle clamp, full range from the factory
            goal = min(max(goal, min_angle), max_angle)
            slew = (speed if speed > 0 else FREE_SPEED_TICKS_S) * dt
            delta = goal - self._cmd
            if delta > slew:
                self._cmd += slew
            elif delta < -slew:
                self._cmd -= slew
            else:
                self._cmd = float(goal)

            cap = (torque_limit / 1000.0) * stall_current_raw()
            load_current = self._advance(dt, cap, events, now)
        else:
            self._cmd = self.position

        self.velocity = (self.position - old_position) / dt

        # friction floor, redrawn when the motion segment changes
        driven = enabled and (
            abs(self.velocity) > 25.0 or abs(self._cmd - self.position) > 2.0
        )
        if driven != self._driven:
            self._driven = driven
            rng_range = MOVING_FLOOR_RANGE if driven else REST_FLOOR_RANGE
            self._floor_base = self.rng.randint(*rng_range)
        floor = self._floor_base + self.rng.getrandbits(1)

        magnitude = (floor + load_current) if enabled else 0.0
        if self.pinned_current is not None:
            magnitude = float(self.pinned_current)
        direction = -1.0 if (self._cmd - self.position) < 0 or self.velocity < 0 else 1.0
        self.current = direction * magnitude

        amps = magnitude * CURRENT_SCALE_A
        self._protection(amps, dt, now, events)
        self._wear(amps, dt, now, events)
        self._store_present()

    def _advance(self, dt: float, cap: float, events: list[Event], now: float) -> float:
        """Move the shaft for one substep; returns the load current in raw units."""
        load = self.load
        gripper = isinstance(load, GripperContactModel)

        if self._in_contact and self.jam_position is None and gripper:
            return self._squeeze(dt, cap)

        # free tracking against hard limits and any scripted obstacle
        target = self._cmd
        lo, hi = float(HARD_STOP_MIN), float(HARD_STOP_MAX)
        if self.jam_position is not None:
            if self.jam_direction > 0:
                hi = min(hi, self.jam_position)
            else:
                lo = max(lo, self.jam_position)
        blocked_target = min(max(target, lo), hi)

        if gripper and load.contact_aperture_mm is not None:
            contact_pos = load.position_at_aperture(load.contact_aperture_mm)
            if blocked_target >= contact_pos > self.position:
                blocked_target = contact_pos
                self.position = blocked_target
                self._contact_position = contact_pos
                self._in_contact = True
                events.append(
                    Event(
                        now,
                        self.servo_id,
                        CONTACT_MADE,
                        {"aperture_mm": round(load.contact_aperture_mm, 3)},
                    )
                )
                return 0.0

        self.position = blocked_target
        blocked_error = abs(target - blocked_target)
        load_current = min(KP_RAW_PER_TICK * blocked_error, cap) if blocked_error > 1e-9 else 0.0
        if isinstance(load, LiftLoadModel):
            load_current += load.holding_current_raw()
        return load_current

    def _squeeze(self, dt: float, cap: float) -> float:
        """In-contact gripper mechanics: drive current from position error,
        shaft creeping toward the torque-balance depth."""
        load = self.load
        error = self._cmd - self.position
        if error < 0.0:
            # opening: the pad pushes the finger back out freely
            self.position = max(self._cmd, 0.0)
            if self.position <= self._contact_position:
                self._in_contact = False
            return 0.0
        applied = min(KP_RAW_PER_TICK * error, cap)
        depth_mm = (self.position - self._contact_position) * load.mm_per_tick
        spring = load.spring_current_raw(depth_mm)
        creep = CREEP_TICKS_PER_S * dt
        if applied > spring + SPRING_HYSTERESIS_RAW:
            self.position = min(self.position + creep, self._cmd)
        elif applied + SPRING_HYSTERESIS_RAW < spring:
            self.position = max(self.position - creep, self._contact_position)
        return applied

    def _protection(self, amps: float, dt: float, now: float, events: list[Event]) -> None:
        prot, ocpt = self._ctrl[6], self._ctrl[7]
        if prot <= 0 or ocpt <= 0:
            return
        if amps >= prot * PROTECTION_CURRENT_SCALE_A:
            self._over_current_steps += 1
            if self._over_current_steps * dt > ocpt * 0.01 and not self.firmware_trip:
                self.firmware_trip = True
                events.append(
                    Event(
                        now,
                        self.servo_id,
                        FIRMWARE_TRIP,
                        {"current_a": round(amps, 4), "held_s": round(self._over_current_steps * dt, 4)},
                    )
                )
        else:
            self._over_current_steps = 0

    def _wear(self, amps: float, dt: float, now: float, events: list[Event]) -> None:
        if self.gear_health <= 0.0:
            return
        rate = damage_rate(amps)
        if rate > 0.0:
            self.gear_health -= rate * dt
            if self.gear_health <= 0.0:
                self.gear_health = 0.0
                events.append(
                    Event(now, self.servo_id, GEAR_FAILURE, {"current_a": round(amps, 4)})
                )

    def _store_present(self) -> None:
        regs = self.regs
        pos = int(round(self.position))
        pos = min(max(pos, 0), 4095)
        speed = int(round(self.velocity))
        speed = min(max(speed, -32767), 32767)
        cur = int(round(self.current))
        cur = min(max(cur, -32767), 32767)
        regs.store_present(pos, speed, cur)
