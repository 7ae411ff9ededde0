"""Synchronous skill runtime: message in, state forward, pushes out.

The runtime owns no sockets and no threads.  A transport (the WebSocket
server, the CLI, a test) feeds it wire-schema messages via
``handle_message`` and calls ``on_tick`` once per control-loop tick;
everything it wants to tell connected consoles accumulates in
``take_pushes``.  That keeps the whole execution pipeline replayable:
same messages at the same ticks, same behavior.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from servostack.loop.control import LOOP_PERIOD_S
from servostack.scheduler.latency import REACTIVE, SCHEDULED, LatencyRecord

from . import face as faces
from .face import Face
from .manifest import ForceAtLeast, JointWithin, SkillRegistry

PENDING_CONFIRMATION = "pending_confirmation"
POSITIONING = "positioning"
RUNNING = "running"
SUCCEEDED = "succeeded"
FAILED = "failed"
ABORTED = "aborted"
PHASES = (PENDING_CONFIRMATION, POSITIONING, RUNNING, SUCCEEDED, FAILED, ABORTED)
TERMINAL = (SUCCEEDED, FAILED, ABORTED)

POSITIONING_TOLERANCE_TICKS = 5
POSITIONING_TIMEOUT_LOOPS = 500  # 10 s
SETTLE_TIMEOUT_LOOPS = 250  # 5 s
KEEPALIVE_LOOPS = 25  # re-assert goals so the dead-man sees a live pilot

PROTOCOL_VERSION = 1


@dataclass
class Execution:
    id: str
    skill: str
    args: dict
    phase: str
    source: str  # "console" | "cron" | "heartbeat" | "hook"
    trigger: str | None = None
    detail: str = ""
    requested_at: float = 0.0
    dispatched_at: float | None = None
    first_motion_at: float | None = None
    finished_at: float | None = None
    run: object = None
    position_deadline: int = 0
    settle_deadline: int = 0
    settling: bool = False
    pre_goals: dict = field(default_factory=dict)
    last_goals: dict = field(default_factory=dict)
    last_goal_loop: int = -1

    def snapshot(self) -> dict:
        return {
            "type": "execution_update",
            "execution_id": self.id,
            "skill": self.skill,
            "phase": self.phase,
            "detail": self.detail,
        }


class SkillRuntime:
    def __init__(self, control, registry: SkillRegistry, *, face: Face | None = None,
                 monotonic=None):
        self.control = control
        self.registry = registry
        self.face = face or Face()
        # default time axis: loop ticks, so latency math is replay-identical
        self._monotonic = monotonic if monotonic is not None else self._loop_time
        self.executions: dict[str, Execution] = {}
        self._active: Execution | None = None
        self._counter = 0
        self._pushes: list[dict] = []
        self.latency_records: list[LatencyRecord] = []
        self.loop_index = 0
        self.face.listeners.append(
            lambda state: self._push({"type": "face", "face": state})
        )
        self.control.motion_listeners.append(self._on_motion)

    # --- transport surface ---

    def handle_message(self, message: dict) -> list[dict]:
        """Apply one inbound wire message; returns the direct replies."""
        if not isinstance(message, dict) or not isinstance(message.get("type"), str):
            return [self._error("bad_message", "messages are objects with a 'type'")]
        kind = message["type"]
        handler = {
            "invoke_skill": self._msg_invoke,
            "confirm": self._msg_confirm,
            "estop": self._msg_estop,
            "reset": self._msg_reset,
            "set_face": self._msg_set_face,
            "subscribe_telemetry": self._msg_subscribe,
        }.get(kind)
        if handler is None:
            return [self._error("unknown_type", f"no such message type {kind!r}")]
        return handler(message)

    def take_pushes(self) -> list[dict]:
        pushes, self._pushes = self._pushes, []
        return pushes

    def telemetry_snapshot(self) -> dict | None:
        observation = self.control.last_observation
        if observation is None:
            return None
        return {
            "type": "telemetry",
            "t": observation.t,
            "arm_positions": list(observation.arm_positions),
            "gripper_raw_current": observation.gripper_raw_current,
            "gripper_normalized": observation.gripper_normalized,
            "lift_position": observation.lift_position,
            "face": self.face.state,
            "estop": self.control.estop_active,
        }

    # --- programmatic invocation (triggers, CLI) ---

    def invoke(self, skill: str, args: dict | None = None, *, source: str = "console",
               trigger: str | None = None, requested_at: float | None = None):
        args = dict(args or {})
        if skill not in self.registry:
            return None, self._error("unknown_skill", f"no skill named {skill!r}")
        manifest = self.registry.manifest(skill)
        problems = manifest.validate_args(args)
        if problems:
            return None, self._error("bad_args", "; ".join(problems))
        if self._active is not None and self._active.phase not in TERMINAL:
            return None, self._error(
                "busy", f"execution {self._active.id} is {self._active.phase}"
            )
        if self.control.estop_active or self.face.state == faces.ESTOP:
            return None, self._error("estopped", "reset before invoking skills")
        self._counter += 1
        execution = Execution(
            id=f"exec-{self._counter}",
            skill=skill,
            args=args,
            phase=PENDING_CONFIRMATION,
            source=source,
            trigger=trigger,
            requested_at=self._monotonic() if requested_at is None else requested_at,
        )
        self.executions[execution.id] = execution
        self._active = execution
        if manifest.requires_confirmation:
            self.face.signal(faces.PENDING_CONFIRMATION)
            self._push(execution.snapshot())
        else:
            self._start(execution)
        return execution, None

    def dispatch(self, dispatch) -> None:
        """Entry point for trigger-engine dispatches."""
        execution, error = self.invoke(
            dispatch.skill,
            dispatch.args,
            source=dispatch.source,
            trigger=dispatch.trigger,
            requested_at=self._monotonic(),
        )
        if error is not None:
            self._push(
                {
                    "type": "trigger_rejected",
                    "trigger": dispatch.trigger,
                    "skill": dispatch.skill,
                    "error": error["error"],
                    "detail": error["detail"],
                }
            )

    # --- per-tick advancement ---

    def on_tick(self) -> None:
        self.loop_index += 1
        if self.control.estop_active and self.face.state != faces.ESTOP:
            # e-stop can arrive from outside the message surface (CLI, test)
            self.face.signal(faces.ESTOP_SIGNAL)
            self._abort_non_terminal("e-stop")
        execution = self._active
        if execution is None or execution.phase in TERMINAL + (PENDING_CONFIRMATION,):
            return
        if execution.phase == POSITIONING:
            self._tick_positioning(execution)
        elif execution.phase == RUNNING:
            self._tick_running(execution)

    # --- message handlers ---

    def _msg_invoke(self, message: dict) -> list[dict]:
        skill = message.get("skill")
        if not isinstance(skill, str):
            return [self._error("bad_message", "invoke_skill needs a 'skill' name")]
        args = message.get("args", {})
        if not isinstance(args, dict):
            return [self._error("bad_message", "'args' must be an object")]
        execution, error = self.invoke(skill, args, source="console")
        if error is not None:
            return [error]
        return [execution.snapshot()]

    def _msg_confirm(self, message: dict) -> list[dict]:
        execution_id = message.get("execution_id")
        execution = self.executions.get(execution_id)
        if (
            execution is None
            or execution is not self._active
            or execution.phase != PENDING_CONFIRMATION
        ):
            return [
                self._error(
                    "no_pending_confirmation",
                    f"nothing awaiting confirmation under id {execution_id!r}",
                )
            ]
        self._start(execution)
        return [execution.snapshot()]

    def _msg_estop(self, message: dict) -> list[dict]:
        self.control.submit_estop()
        self.face.signal(faces.ESTOP_SIGNAL)
        aborted = self._abort_non_terminal("e-stop")
        return [{"type": "estop_engaged"}] + [e.snapshot() for e in aborted]

    def _msg_reset(self, message: dict) -> list[dict]:
        self.control.submit_reset()
        self.face.signal(faces.RESET)
        return [{"type": "reset_done", "face": self.face.state}]

    def _msg_set_face(self, message: dict) -> list[dict]:
        wanted = message.get("face")
        if wanted not in faces.FACES:
            return [self._error("bad_face", f"face must be one of {list(faces.FACES)}")]
        return [{"type": "face", "face": self.face.set(wanted)}]

    def _msg_subscribe(self, message: dict) -> list[dict]:
        every = message.get("every_n_ticks", 5)
        if not isinstance(every, int) or isinstance(every, bool) or every < 1:
            return [self._error("bad_message", "'every_n_ticks' must be a positive integer")]
        return [{"type": "subscribed", "every_n_ticks": every}]

    # --- execution machinery ---

    def _start(self, execution: Execution) -> None:
        manifest = self.registry.manifest(execution.skill)
        execution.dispatched_at = self._monotonic()
        self.face.signal(faces.DISPATCH)
        pre = dict(manifest.pre_pose or {})
        if manifest.z_height is not None:
            pre[self._lift_joint()] = manifest.z_height
        if pre:
            execution.phase = POSITIONING
            execution.pre_goals = pre
            execution.position_deadline = self.loop_index + POSITIONING_TIMEOUT_LOOPS
            self._submit(execution, pre)
        else:
            self._enter_running(execution)
        if execution.phase not in TERMINAL:  # a failed start already pushed
            self._push(execution.snapshot())

    def _enter_running(self, execution: Execution) -> None:
        manifest = self.registry.manifest(execution.skill)
        routine = self.registry.routine(execution.skill)
        try:
            execution.run = routine.start(execution.args, self._arm_joints())
        except (ValueError, KeyError) as problem:
            self._finish(execution, FAILED, f"could not start: {problem}")
            return
        execution.phase = RUNNING
        execution.settling = False

    def _tick_positioning(self, execution: Execution) -> None:
        if self._within(execution.pre_goals, POSITIONING_TOLERANCE_TICKS):
            self._enter_running(execution)
            if execution.phase == RUNNING:
                self._push(execution.snapshot())
            return
        if self.loop_index >= execution.position_deadline:
            self._finish(execution, FAILED, "pre-pose not reached in time")
            return
        self._keepalive(execution)

    def _tick_running(self, execution: Execution) -> None:
        if not execution.settling:
            goals, finished = execution.run.tick()
            if goals:
                self._submit(execution, goals)
            elif finished:
                execution.settling = True
                execution.settle_deadline = self.loop_index + SETTLE_TIMEOUT_LOOPS
            else:
                self._keepalive(execution)
        if execution.settling:
            if self._success_met(execution):
                self._finish(execution, SUCCEEDED, "")
            elif self.loop_index >= execution.settle_deadline:
                self._finish(execution, FAILED, "success conditions not met")
            else:
                self._keepalive(execution)

    def _success_met(self, execution: Execution) -> bool:
        manifest = self.registry.manifest(execution.skill)
        for check in manifest.success:
            if isinstance(check, JointWithin):
                position = self.control.joint_position(check.joint)
                target = check.resolve_target(execution.args)
                if position is None or abs(position - target) > check.tolerance_ticks:
                    return False
            elif isinstance(check, ForceAtLeast):
                frame = self._observation()
                if frame is None or frame.gripper_normalized < check.minimum_normalized:
                    return False
        return True

    def _finish(self, execution: Execution, phase: str, detail: str) -> None:
        execution.phase = phase
        execution.detail = detail
        execution.finished_at = self._monotonic()
        self.face.signal(
            {SUCCEEDED: faces.SUCCESS, FAILED: faces.FAILURE, ABORTED: faces.ABORTED}[phase]
        )
        self._record_latency(execution)
        self._push(execution.snapshot())

    def _abort_non_terminal(self, reason: str) -> list[Execution]:
        aborted = []
        for execution in self.executions.values():
            if execution.phase not in TERMINAL:
                execution.phase = ABORTED
                execution.detail = reason
                execution.finished_at = self._monotonic()
                self._record_latency(execution)
                self._push(execution.snapshot())
                aborted.append(execution)
        return aborted

    def _record_latency(self, execution: Execution) -> None:
        if execution.dispatched_at is None:
            return  # never started (aborted while pending)
        source = SCHEDULED if execution.source in ("cron", "heartbeat") else REACTIVE
        self.latency_records.append(
            LatencyRecord(
                trigger=execution.trigger or execution.skill,
                source=source,
                t_trigger=execution.requested_at,
                t_dispatch=execution.dispatched_at,
                t_first_motion=execution.first_motion_at,
            )
        )

    # --- helpers ---

    def _submit(self, execution: Execution, goals: dict) -> None:
        self.control.submit_goals(goals)
        execution.last_goals = dict(goals)
        execution.last_goal_loop = self.loop_index

    def _keepalive(self, execution: Execution) -> None:
        stale = self.loop_index - execution.last_goal_loop >= KEEPALIVE_LOOPS
        if stale and execution.last_goals:
            self._submit(execution, execution.last_goals)

    def _within(self, goals: dict, tolerance: int) -> bool:
        for joint, target in goals.items():
            position = self.control.joint_position(joint)
            clamped = self._clamped_target(joint, target)
            if position is None or abs(position - clamped) > tolerance:
                return False
        return True

    def _clamped_target(self, joint: str, target: int) -> int:
        spec = self.control.joint(joint)
        return min(max(int(target), spec.min_ticks), spec.max_ticks)

    def _observation(self):
        return self.control.last_observation

    def _arm_joints(self) -> list[str]:
        return [j.name for j in self.control.observation_joints() if not j.lift]

    def _lift_joint(self) -> str:
        lifts = [j.name for j in self.control.observation_joints() if j.lift]
        if not lifts:
            raise ValueError("no lift joint on the observation bus")
        return lifts[0]

    def _on_motion(self, t: float) -> None:
        execution = self._active
        if (
            execution is not None
            and execution.phase in (POSITIONING, RUNNING)
            and execution.first_motion_at is None
        ):
            execution.first_motion_at = self._monotonic()

    def _loop_time(self) -> float:
        return self.loop_index * LOOP_PERIOD_S

    def _push(self, message: dict) -> None:
        self._pushes.append(message)

    def _error(self, code: str, detail: str) -> dict:
        return {"type": "error", "error": code, "detail": detail}
