"""Event records shared by the simulator and the protection layers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

# Hardware-side events (emitted by the servo model)
FIRMWARE_TRIP = "FIRMWARE_TRIP"
GEAR_FAILURE = "GEAR_FAILURE"
CONTACT_MADE = "CONTACT_MADE"
# Software-side events (emitted by the control loop / safety layer)
GOAL_CLAMPED = "GOAL_CLAMPED"
GRIPPER_STALL = "GRIPPER_STALL"
JOINT_STALL = "JOINT_STALL"
DEGRADED = "DEGRADED"
HOLD_TRIGGERED = "HOLD_TRIGGERED"
ESTOP_ENGAGED = "ESTOP_ENGAGED"


@dataclass
class Event:
    t: float  # simulated seconds since scenario start
    servo_id: int  # -1 when not tied to one servo
    kind: str
    detail: dict = field(default_factory=dict)

    def to_json(self) -> str:
        record = {"t": round(self.t, 6), "servo_id": self.servo_id, "kind": self.kind}
        if self.detail:
            record["detail"] = self.detail
        return json.dumps(record, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "Event":
        raw = json.loads(line)
        return cls(raw["t"], raw["servo_id"], raw["kind"], raw.get("detail", {}))


class EventLog:
    """Append-only event collector, serializable line by line."""

    def __init__(self):
        self.events: list[Event] = []

    def emit(self, event: Event) -> None:
        self.events.append(event)

    def count(self, kind: str) -> int:
        return sum(1 for e in self.events if e.kind == kind)

    def of_kind(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def dump_lines(self) -> str:
        return "".join(e.to_json() + "\n" for e in self.events)
