"""Load models hanging off simulated servos.

All conversions funnel through the motor constant (kg·cm per A at the output
shaft, gearbox included) and the current register's telemetry scale, so a
load's effect is always expressed in raw current units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from servostack.bus.registers import CURRENT_SCALE_A

TICKS_PER_REV = 4096
STALL_CURRENT_A = 2.7  # magnetic gearbox limit at full torque
KT_KGCM_PER_A = 10.0  # torque constant at the output shaft
KGF_PER_N = 1.0 / 9.81
KGCM_PER_NM = 1.0 / 0.0980665

# Gears shed health above this current; the constant is sized so a dead
# stall at 2.7 A strips a pristine gear train in 3.0 s.
DAMAGE_THRESHOLD_A = 1.8
DAMAGE_CONSTANT_AS = (STALL_CURRENT_A - DAMAGE_THRESHOLD_A) * 3.0


def stall_current_raw() -> float:
    return STALL_CURRENT_A / CURRENT_SCALE_A


def damage_rate(current_a: float) -> float:
    """Gear health lost per second at a given current magnitude."""
    return max(0.0, abs(current_a) - DAMAGE_THRESHOLD_A) / DAMAGE_CONSTANT_AS


def time_to_failure(current_a: float) -> float:
    rate = damage_rate(current_a)
    return math.inf if rate == 0.0 else 1.0 / rate


@dataclass
class FreeLoad:
    """No mechanical load; the servo tracks its setpoint freely."""

    kind: str = "free"


@dataclass
class GripperContactModel:
    """Compliant fingertip squeezing a rigid object.

    The fingertip is a lever off the servo horn, so tip travel per tick is
    lever_arm * 2*pi / 4096.  Pad force is linear in squeeze depth.
    """

    pad_stiffness_n_per_mm: float = 3.0
    lever_arm_cm: float = 3.0
    close_tip_speed_mm_s: float = 35.0
    kind: str = "gripper"
    # object state, scripted by scenarios
    contact_aperture_mm: float | None = None
    open_position_ticks: int = 1000
    open_aperture_mm: float = 60.0

    @property
    def mm_per_tick(self) -> float:
        return self.lever_arm_cm * 10.0 * 2.0 * math.pi / TICKS_PER_REV

    @property
    def raw_per_mm(self) -> float:
        """Raw current units per millimetre of squeeze, via the spring chain."""
        kgcm_per_mm = self.pad_stiffness_n_per_mm * KGF_PER_N * self.lever_arm_cm
        return kgcm_per_mm / KT_KGCM_PER_A / CURRENT_SCALE_A

    def aperture_mm(self, position_ticks: float) -> float:
        travelled = (position_ticks - self.open_position_ticks) * self.mm_per_tick
        return self.open_aperture_mm - travelled

    def position_at_aperture(self, aperture_mm: float) -> float:
        travelled = self.open_aperture_mm - aperture_mm
        return self.open_position_ticks + travelled / self.mm_per_tick

    def spring_current_raw(self, squeeze_depth_mm: float) -> float:
        """Holding current for a static squeeze, floor excluded."""
        return max(0.0, squeeze_depth_mm) * self.raw_per_mm

    def depth_for_current_raw(self, raw: float) -> float:
        return max(0.0, raw) / self.raw_per_mm


@dataclass
class LiftLoadModel:
    """Ball-screw Z axis under gravity.

    Screw torque for a hanging mass is m*g*lead / (2*pi*eff); the reduction
    is already folded into the motor constant, so no extra gear term appears.
    The screw does not back-drive: unpowered, the carriage stays put.
    """

    payload_mass_kg: float = 0.0
    screw_lead_mm: float = 5.0
    screw_efficiency: float = 0.9
    reduction: int = 345
    travel_mm: float = 600.0
    kind: str = "lift"

    def holding_torque_kgcm(self, mass_kg: float | None = None) -> float:
        mass = self.payload_mass_kg if mass_kg is None else mass_kg
        force_n = mass * 9.81
        torque_nm = force_n * (self.screw_lead_mm / 1000.0) / (
            2.0 * math.pi * self.screw_efficiency
        )
        return torque_nm * KGCM_PER_NM

    def holding_current_raw(self, mass_kg: float | None = None) -> float:
        amps = self.holding_torque_kgcm(mass_kg) / KT_KGCM_PER_A
        return amps / CURRENT_SCALE_A


@dataclass
class RigidJam:
    """Infinite-stiffness obstacle; scenario scripting pins the joint on it."""

    position_ticks: float = 0.0
    kind: str = "jam"


LoadModel = FreeLoad | GripperContactModel | LiftLoadModel


def gripper_contact_current(
    squeeze_depth_mm: float,
    model: GripperContactModel | None = None,
    idle_floor_raw: float = 20.0,
) -> float:
    """Expected current reading for a static squeeze, idle floor included.

    Chain: depth -> pad force (N) -> fingertip torque (kg·cm via the lever
    arm) -> amps through the motor constant -> raw units at the telemetry
    scale, sitting on top of the idle friction floor.
    """
    model = model or GripperContactModel()
    return idle_floor_raw + model.spring_current_raw(squeeze_depth_mm)


def lift_holding_current(mass_kg: float, model: LiftLoadModel | None = None) -> float:
    """Raw current the lift draws to hold ``mass_kg``, floor excluded."""
    model = model or LiftLoadModel()
    return model.holding_current_raw(mass_kg)
