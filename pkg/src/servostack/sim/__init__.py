"""Register-accurate servo and bus simulation."""

from .bus import BusTimeout, SimBus, Transaction
from .events import (
    CONTACT_MADE,
    DEGRADED,
    ESTOP_ENGAGED,
    Event,
    EventLog,
    FIRMWARE_TRIP,
    GEAR_FAILURE,
    GOAL_CLAMPED,
    GRIPPER_STALL,
    HOLD_TRIGGERED,
    JOINT_STALL,
)
from .loads import (
    DAMAGE_CONSTANT_AS,
    DAMAGE_THRESHOLD_A,
    FreeLoad,
    GripperContactModel,
    LiftLoadModel,
    RigidJam,
    damage_rate,
    gripper_contact_current,
    lift_holding_current,
    stall_current_raw,
    time_to_failure,
)
from .register_file import RegisterFile
from .servo import (
    CREEP_TICKS_PER_S,
    FREE_SPEED_TICKS_S,
    INTERNAL_DT,
    KP_RAW_PER_TICK,
    SimServo,
)

__all__ = [
    "BusTimeout",
    "SimBus",
    "Transaction",
    "CONTACT_MADE",
    "DEGRADED",
    "ESTOP_ENGAGED",
    "Event",
    "EventLog",
    "FIRMWARE_TRIP",
    "GEAR_FAILURE",
    "GOAL_CLAMPED",
    "GRIPPER_STALL",
    "HOLD_TRIGGERED",
    "JOINT_STALL",
    "RegisterFile",
    "DAMAGE_CONSTANT_AS",
    "DAMAGE_THRESHOLD_A",
    "FreeLoad",
    "GripperContactModel",
    "LiftLoadModel",
    "RigidJam",
    "damage_rate",
    "gripper_contact_current",
    "lift_holding_current",
    "stall_current_raw",
    "time_to_failure",
    "CREEP_TICKS_PER_S",
    "FREE_SPEED_TICKS_S",
    "INTERNAL_DT",
    "KP_RAW_PER_TICK",
    "SimServo",
]
