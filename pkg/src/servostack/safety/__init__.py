"""Software burn-out protection: goal clamps, stall handling, EEPROM backstops."""

from .clamp import clamp_goal
from .provision import (
    PROTECTION_CURRENT_RAW,
    PROTECTION_TIME_UNITS,
    TORQUE_CEILING,
    ProvisionResult,
    build_provision_plan,
    provision_servo,
)
from .stall import (
    MONITORING,
    REDUCE_TORQUE,
    RESTORE_TORQUE,
    RETRY_FULL_TORQUE,
    RETRYING,
    STALLED,
    StallAction,
    StallDetector,
)

__all__ = [
    "clamp_goal",
    "PROTECTION_CURRENT_RAW",
    "PROTECTION_TIME_UNITS",
    "TORQUE_CEILING",
    "ProvisionResult",
    "build_provision_plan",
    "provision_servo",
    "MONITORING",
    "REDUCE_TORQUE",
    "RESTORE_TORQUE",
    "RETRY_FULL_TORQUE",
    "RETRYING",
    "STALLED",
    "StallAction",
    "StallDetector",
]
