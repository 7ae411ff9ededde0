"""The 50 Hz loop: one telemetry read per bus, safety decisions, clamped writes.

Per tick and per bus: a single sync read covering position through current
(force estimation piggybacks on it; nothing may issue a second read), stall
detectors over the fresh telemetry, then at most one goal sync write and one
torque sync write.  Inbound commands pass through a queue drained once per
tick with e-stop honored ahead of everything else in the batch.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from servostack.bus import build_sync_read, build_sync_write, decode, encode
from servostack.force import ForceCalibration, normalize
from servostack.safety import StallDetector, clamp_goal
from servostack.sim import BusTimeout, Event, SimBus, Transaction
from servostack.sim.events import (
    DEGRADED,
    ESTOP_ENGAGED,
    EventLog,
    GOAL_CLAMPED,
    HOLD_TRIGGERED,
)

from .budget import BusBudgetModel
from .episode import EpisodeHeader, EpisodeStep, EpisodeWriter

LOOP_RATE_HZ = 50
LOOP_PERIOD_S = 1.0 / LOOP_RATE_HZ
DEAD_MAN_TIMEOUT_S = 2.0

# A freeze (e-stop or dead-man hold) pins joints at their present position,
# except a gripper that is actively squeezing: re-targeting it to "here"
# would let the pad spring back the fingers and drop the payload.
GRIP_KEEP_NORMALIZED = 0.3

HOLD = "hold"
CONTINUE = "continue"


def dead_man_check(last_command_age_s: float, timeout_s: float = DEAD_MAN_TIMEOUT_S) -> str:
    """Strictly greater than the timeout: an age of exactly 2.0 s continues."""
    return HOLD if last_command_age_s > timeout_s else CONTINUE


@dataclass(frozen=True)
class JointSpec:
    name: str
    servo_id: int
    min_ticks: int = 0
    max_ticks: int = 4095
    gripper: bool = False
    lift: bool = False


@dataclass(frozen=True)
class JointTelemetry:
    position: int
    speed: int
    current: int


@dataclass(frozen=True)
class ObservationFrame:
    t: float
    arm_positions: tuple[int, ...]
    gripper_raw_current: int
    gripper_normalized: float
    lift_position: int


@dataclass
class TickReport:
    t: float
    observation: ObservationFrame | None = None
    bus_ms: dict[str, float] = field(default_factory=dict)
    transaction_kinds: dict[str, list[str]] = field(default_factory=dict)
    degraded_buses: list[str] = field(default_factory=list)
    wrote_goals: bool = False


class BusLane:
    """One bus and the joints living on it; owns their stall detectors."""

    def __init__(self, name: str, bus: SimBus, joints: list[JointSpec]):
        self.name = name
        self.bus = bus
        self.joints = list(joints)
        self.by_id = {j.servo_id: j for j in self.joints}
        if len(self.by_id) != len(self.joints):
            raise ValueError(f"duplicate servo ids on bus {name}")
        self.ids = [j.servo_id for j in self.joints]
        self.detectors = {
            j.servo_id: StallDetector(j.servo_id, gripper=j.gripper) for j in self.joints
        }
        # detector-facing goals: skill/teleop targets only, so a safety
        # freeze (e-stop, dead-man) never masquerades as a fresh command
        self.commanded_goal: dict[int, int] = {}

        regmap = bus.regmap
        position = regmap["Present_Position"]
        speed = regmap["Present_Speed"]
        current = regmap["Present_Current"]
        self._tel_specs = (position, speed, current)
        self._tel_start = position.address
        self._tel_span = max(s.address + s.width for s in self._tel_specs) - self._tel_start
        self._goal_spec = regmap["Goal_Position"]
        self._torque_spec = regmap["Torque_Limit"]

    def read_telemetry(self) -> tuple[dict[int, JointTelemetry], Transaction]:
        packet = build_sync_read(self._tel_start, self._tel_span, self.ids)
        frames, record = self.bus.transact(encode(packet))
        regmap = self.bus.regmap
        telemetry = {}
        for frame in frames:
            status = decode(frame, expect="status")
            values = []
            for spec in self._tel_specs:
                offset = spec.address - self._tel_start
                values.append(
                    regmap.decode_value(spec, status.params[offset : offset + spec.width])
                )
            telemetry[status.servo_id] = JointTelemetry(*values)
        return telemetry, record

    def write_goals(self, goals: dict[int, int]) -> Transaction:
        packet = build_sync_write(self._goal_spec.address, self._goal_spec.width, goals)
        _, record = self.bus.transact(encode(packet))
        return record

    def write_torques(self, torques: dict[int, int]) -> Transaction:
        packet = build_sync_write(self._torque_spec.address, self._torque_spec.width, torques)
        _, record = self.bus.transact(encode(packet))
        return record


class ControlLoop:
    """Owns the lanes, the command queue, and the per-tick safety pipeline."""

    def __init__(
        self,
        lanes: list[BusLane],
        *,
        event_log: EventLog | None = None,
        budget: BusBudgetModel | None = None,
        dead_man_timeout_s: float = DEAD_MAN_TIMEOUT_S,
        force_calibration: ForceCalibration | None = None,
        observation_lane: str | None = None,
    ):
        self.lanes = list(lanes)
        self.event_log = event_log if event_log is not None else EventLog()
        self.budget = budget or BusBudgetModel()
        self.dead_man_timeout_s = dead_man_timeout_s
        self.force_calibration = force_calibration or ForceCalibration()
        self.observation_lane = observation_lane or self.lanes[0].name
        self._joint_index: dict[str, tuple[BusLane, JointSpec]] = {}
        for lane in self.lanes:
            for joint in lane.joints:
                if joint.name in self._joint_index:
                    raise ValueError(f"duplicate joint name {joint.name!r}")
                self._joint_index[joint.name] = (lane, joint)
        self._queue: deque = deque()
        self.estop_active = False
        self.holding = False
        self._freeze_pending: set[str] = set()
        self._last_command_t: float | None = None
        self._recorder: EpisodeWriter | None = None
        self.latest: dict[str, dict[int, JointTelemetry]] = {}
        self.last_observation: ObservationFrame | None = None
        self.motion_listeners: list = []
        self.tick_index = 0

    # --- command surface (queued; applied at the next tick) ---

    def submit_goals(self, goals: dict[str, int]) -> None:
        unknown = [name for name in goals if name not in self._joint_index]
        if unknown:
            raise KeyError(f"unknown joints: {', '.join(sorted(unknown))}")
        self._queue.append(("goals", dict(goals)))

    def submit_estop(self) -> None:
        self._queue.append(("estop", None))

    def submit_reset(self) -> None:
        self._queue.append(("reset", None))

    def set_force_calibration(self, calibration: ForceCalibration) -> None:
        self.force_calibration = calibration

    def joint(self, name: str) -> JointSpec:
        return self._joint_index[name][1]

    def observation_joints(self) -> list[JointSpec]:
        """Joint specs on the bus the policy observes, in declared order."""
        return list(self._lane(self.observation_lane).joints)

    def joint_position(self, name: str) -> int | None:
        lane, spec = self._joint_index[name]
        telemetry = self.latest.get(lane.name, {}).get(spec.servo_id)
        return None if telemetry is None else telemetry.position

    # --- recording ---

    def start_episode(self, path, task: str = "") -> EpisodeWriter:
        if self._recorder is not None:
            raise RuntimeError("an episode is already recording")
        lane = self._lane(self.observation_lane)
        header = EpisodeHeader(
            joints=[j.name for j in lane.joints],
            rate_hz=LOOP_RATE_HZ,
            calibration=self.force_calibration,
            task=task,
        )
        self._recorder = EpisodeWriter(path, header)
        return self._recorder

    def end_episode(self) -> None:
        if self._recorder is not None:
            self._recorder.close()
            self._recorder = None

    # --- the tick ---

    def tick(self, now: float) -> TickReport:
        report = TickReport(t=now)
        pending = self._drain_queue(now)
        estop_edge = pending is None

        if (
            not self.estop_active
            and not self.holding
            and self._last_command_t is not None
            and dead_man_check(now - self._last_command_t, self.dead_man_timeout_s) == HOLD
        ):
            self.holding = True
            self._freeze_pending.update(lane.name for lane in self.lanes)
            self.event_log.emit(
                Event(now, -1, HOLD_TRIGGERED, {"age_s": round(now - self._last_command_t, 3)})
            )
        if estop_edge:
            self._freeze_pending.update(lane.name for lane in self.lanes)

        goal_writes_this_tick = False
        for lane in self.lanes:
            for event in lane.bus.drain_events():
                self.event_log.emit(event)
            transactions: list[Transaction] = []
            try:
                telemetry, record = lane.read_telemetry()
            except BusTimeout:
                report.degraded_buses.append(lane.name)
                self.event_log.emit(Event(now, -1, DEGRADED, {"bus": lane.name}))
                report.bus_ms[lane.name] = 0.0
                report.transaction_kinds[lane.name] = []
                continue
            transactions.append(record)
            self.latest[lane.name] = telemetry

            torques: dict[int, int] = {}
            for joint in lane.joints:
                sample = telemetry.get(joint.servo_id)
                if sample is None:
                    continue
                goal = lane.commanded_goal.get(joint.servo_id, -1)
                action = lane.detectors[joint.servo_id].update(
                    sample.position, sample.current, goal
                )
                if action is None:
                    continue
                torques[joint.servo_id] = action.torque_limit
                if action.event is not None:
                    self.event_log.emit(
                        Event(
                            now,
                            joint.servo_id,
                            action.event,
                            {
                                "bus": lane.name,
                                "joint": joint.name,
                                "torque_limit": action.torque_limit,
                            },
                        )
                    )

            goals: dict[int, int] = {}
            freeze = lane.name in self._freeze_pending
            if freeze:
                for joint in lane.joints:
                    sample = telemetry.get(joint.servo_id)
                    if sample is None:
                        continue
                    if (
                        joint.gripper
                        and normalize(sample.current, self.force_calibration)
                        >= GRIP_KEEP_NORMALIZED
                    ):
                        # mid-grasp: leave the squeeze target (and any reduced
                        # torque limit) in place instead of releasing the object
                        continue
                    goals[joint.servo_id] = sample.position
                self._freeze_pending.discard(lane.name)
            elif pending and not self.estop_active and not self.holding:
                for name, target in pending.items():
                    owner, joint = self._joint_index[name]
                    if owner is not lane:
                        continue
                    clamped = clamp_goal(int(target), joint.min_ticks, joint.max_ticks)
                    if clamped != target:
                        self.event_log.emit(
                            Event(
                                now,
                                joint.servo_id,
                                GOAL_CLAMPED,
                                {"joint": joint.name, "requested": int(target), "clamped": clamped},
                            )
                        )
                    goals[joint.servo_id] = clamped
                    lane.commanded_goal[joint.servo_id] = clamped

            if torques:
                transactions.append(lane.write_torques(torques))
            if goals:
                transactions.append(lane.write_goals(goals))
                if not freeze:
                    goal_writes_this_tick = True

            report.bus_ms[lane.name] = self.budget.predict_ms(transactions)
            report.transaction_kinds[lane.name] = [t.kind for t in transactions]

        if estop_edge:
            self.event_log.emit(Event(now, -1, ESTOP_ENGAGED, {}))

        report.wrote_goals = goal_writes_this_tick
        if goal_writes_this_tick:
            for listener in list(self.motion_listeners):
                listener(now)

        report.observation = self._observe(now)
        if report.observation is not None:
            self.last_observation = report.observation
        if self._recorder is not None and report.observation is not None:
            obs = report.observation
            lane = self._lane(self.observation_lane)
            action = None
            if goal_writes_this_tick:
                arm = [j for j in lane.joints if not j.lift]
                if all(j.servo_id in lane.commanded_goal for j in arm):
                    action = [lane.commanded_goal[j.servo_id] for j in arm]
            self._recorder.append(
                EpisodeStep(
                    t=obs.t,
                    arm_positions=list(obs.arm_positions),
                    lift_position=obs.lift_position,
                    gripper_raw_current=obs.gripper_raw_current,
                    gripper_normalized=obs.gripper_normalized,
                    action=action,
                )
            )

        self.tick_index += 1
        return report

    # --- internals ---

    def _lane(self, name: str) -> BusLane:
        for lane in self.lanes:
            if lane.name == name:
                return lane
        raise KeyError(f"no bus named {name!r}")

    def _drain_queue(self, now: float):
        """Apply queued commands; returns pending goals, or None on e-stop edge.

        An e-stop anywhere in the batch discards the rest of the batch: no
        goal (or reset) queued alongside it survives.
        """
        batch = list(self._queue)
        self._queue.clear()
        if any(kind == "estop" for kind, _ in batch):
            edge = not self.estop_active
            self.estop_active = True
            self.holding = False
            self._last_command_t = None
            return None if edge else {}
        pending: dict[str, int] = {}
        for kind, payload in batch:
            if kind == "reset":
                self.estop_active = False
                self.holding = False
                self._freeze_pending.clear()
                self._last_command_t = None
            elif kind == "goals" and not self.estop_active:
                pending.update(payload)
        if pending:
            self._last_command_t = now
            self.holding = False
        return pending

    def _observe(self, now: float) -> ObservationFrame | None:
        lane = self._lane(self.observation_lane)
        telemetry = self.latest.get(lane.name)
        if not telemetry:
            return None
        arm = [j for j in lane.joints if not j.lift]
        grippers = [j for j in arm if j.gripper]
        lifts = [j for j in lane.joints if j.lift]
        if not grippers or any(j.servo_id not in telemetry for j in lane.joints):
            return None
        raw = telemetry[grippers[0].servo_id].current
        return ObservationFrame(
            t=now,
            arm_positions=tuple(telemetry[j.servo_id].position for j in arm),
            gripper_raw_current=raw,
            gripper_normalized=normalize(raw, self.force_calibration),
            lift_position=telemetry[lifts[0].servo_id].position if lifts else 0,
        )
