"""Third protection layer: one-time EEPROM backstops burned into each servo.

The values are chosen so the servo saves itself even with the host down:
the overload comparator opens at 1.8 A held for 1.5 s, and the boot-time
torque ceiling keeps any later full-torque request under the gear budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from servostack.bus import InstructionPacket, StatusPacket, build_read, build_write
from servostack.bus.registers import RegisterMap

# 450 units at the comparator's 4 mA/unit scale = 1.8 A
PROTECTION_CURRENT_RAW = 450
# units of 10 ms: trip after 1.5 s of sustained overload
PROTECTION_TIME_UNITS = 150
# reseeds Torque_Limit at every boot; humans can still raise it per move
TORQUE_CEILING = 600

_BACKSTOPS = (
    ("Protection_Current", PROTECTION_CURRENT_RAW),
    ("Over_Current_Protection_Time", PROTECTION_TIME_UNITS),
    ("Max_Torque_Limit", TORQUE_CEILING),
)

Transactor = Callable[[InstructionPacket], StatusPacket | None]


@dataclass
class ProvisionResult:
    servo_id: int
    ok: bool
    written: dict[str, int] = field(default_factory=dict)
    readback: dict[str, int] = field(default_factory=dict)
    reason: str | None = None


def _write(regmap: RegisterMap, servo_id: int, name: str, value: int) -> InstructionPacket:
    spec = regmap[name]
    return build_write(servo_id, spec.address, regmap.encode_value(spec, value))


def build_provision_plan(regmap: RegisterMap, servo_id: int) -> list[InstructionPacket]:
    """Unlock, burn the three backstops, relock.  Verification reads separately."""
    plan = [_write(regmap, servo_id, "Lock", 0)]
    plan += [_write(regmap, servo_id, name, value) for name, value in _BACKSTOPS]
    plan.append(_write(regmap, servo_id, "Lock", 1))
    return plan


def provision_servo(
    regmap: RegisterMap, servo_id: int, transact: Transactor
) -> ProvisionResult:
    """Apply the backstop plan to one servo and verify it by reading back.

    A servo whose lock latch is stuck rejects the EEPROM writes silently
    (the unlock is acked but never takes), so only the readback tells the
    truth; never trust the write acks alone.
    """
    result = ProvisionResult(servo_id, ok=False, written=dict(_BACKSTOPS))
    for packet in build_provision_plan(regmap, servo_id):
        status = transact(packet)
        if status is None:
            result.reason = "no response"
            return result

    specs = [regmap[name] for name, _ in _BACKSTOPS]
    lo = min(s.address for s in specs)
    hi = max(s.address + s.width for s in specs)
    status = transact(build_read(servo_id, lo, hi - lo))
    if status is None:
        result.reason = "no response to verification read"
        return result
    for spec in specs:
        raw = status.params[spec.address - lo : spec.address - lo + spec.width]
        result.readback[spec.name] = regmap.decode_value(spec, raw)

    mismatched = [
        name for name, value in _BACKSTOPS if result.readback.get(name) != value
    ]
    if mismatched:
        result.reason = (
            f"readback mismatch on {', '.join(mismatched)}; lock latch likely stuck"
        )
        return result
    result.ok = True
    return result
