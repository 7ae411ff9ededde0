"""Second protection layer: per-servo stall detection at the loop rate.

A stall is declared after a full window of consecutive loop ticks in which
the current sits at or above the threshold while the shaft has effectively
stopped moving.  Grippers fold straight into a reduced-torque hold (that is
a successful grasp); other joints get one full-torque retry and then back
off to a relaxed torque.  Torque is only ever restored when a fresh goal
arrives, never by the detector on its own.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from servostack.sim.events import GRIPPER_STALL, JOINT_STALL

MONITORING = "monitoring"
RETRYING = "retrying"
STALLED = "stalled"

REDUCE_TORQUE = "reduce_torque"
RETRY_FULL_TORQUE = "retry_full_torque"
RESTORE_TORQUE = "restore_torque"

GRIPPER_CURRENT_THRESHOLD_RAW = 90.0
JOINT_CURRENT_THRESHOLD_RAW = 250.0
STALL_EPSILON_TICKS = 2
STALL_WINDOW_LOOPS = 15


@dataclass(frozen=True)
class StallAction:
    """What the control loop should write, plus the event to record (if any)."""

    kind: str
    torque_limit: int
    event: str | None = None


class StallDetector:
    def __init__(
        self,
        servo_id: int,
        *,
        gripper: bool = False,
        current_threshold_raw: float | None = None,
        epsilon_ticks: int = STALL_EPSILON_TICKS,
        window_loops: int = STALL_WINDOW_LOOPS,
        hold_torque: int = 200,
        relaxed_torque: int = 100,
        full_torque: int = 1000,
    ):
        self.servo_id = servo_id
        self.gripper = gripper
        if current_threshold_raw is None:
            current_threshold_raw = (
                GRIPPER_CURRENT_THRESHOLD_RAW if gripper else JOINT_CURRENT_THRESHOLD_RAW
            )
        self.current_threshold_raw = current_threshold_raw
        self.epsilon_ticks = epsilon_ticks
        self.window_loops = window_loops
        self.hold_torque = hold_torque
        self.relaxed_torque = relaxed_torque
        self.full_torque = full_torque
        self.state = MONITORING
        self._flags: deque[bool] = deque(maxlen=window_loops)
        self._last_position: int | None = None
        self._last_goal: int | None = None

    def reset(self) -> None:
        self.state = MONITORING
        self._flags.clear()
        self._last_position = None
        self._last_goal = None

    def update(self, position: int, current: int, goal: int) -> StallAction | None:
        """Feed one loop tick of telemetry; returns at most one action."""
        restore = None
        if self._last_goal is not None and goal != self._last_goal:
            self._flags.clear()
            if self.state in (RETRYING, STALLED):
                restore = StallAction(RESTORE_TORQUE, self.full_torque)
            self.state = MONITORING
        self._last_goal = goal

        stopped = (
            self._last_position is not None
            and abs(position - self._last_position) <= self.epsilon_ticks
        )
        self._last_position = position
        self._flags.append(stopped and abs(current) >= self.current_threshold_raw)
        if restore is not None:
            return restore

        if len(self._flags) < self.window_loops or not all(self._flags):
            return None
        if self.state == MONITORING:
            if self.gripper:
                self.state = STALLED
                return StallAction(REDUCE_TORQUE, self.hold_torque, GRIPPER_STALL)
            self.state = RETRYING
            self._flags.clear()
            return StallAction(RETRY_FULL_TORQUE, self.full_torque, JOINT_STALL)
        if self.state == RETRYING:
            self.state = STALLED
            self._flags.clear()
            return StallAction(REDUCE_TORQUE, self.relaxed_torque)
        return None  # already stalled: hold quietly until the goal changes
