from .budget import (
    BudgetVerdict,
    BusBudgetModel,
    PlannedTransaction,
    baseline_plan,
    duplicate_current_read_plan,
    goal_write_bytes,
    per_servo_read_bytes,
    telemetry_read_bytes,
)
from .control import (
    CONTINUE,
    DEAD_MAN_TIMEOUT_S,
    HOLD,
    LOOP_PERIOD_S,
    LOOP_RATE_HZ,
    BusLane,
    ControlLoop,
    JointSpec,
    JointTelemetry,
    ObservationFrame,
    TickReport,
    dead_man_check,
)
from .episode import (
    EpisodeHeader,
    EpisodeStep,
    EpisodeWriter,
    RecordingError,
    read_episode,
    verify_replay,
)

__all__ = [
    "BudgetVerdict",
    "BusBudgetModel",
    "BusLane",
    "CONTINUE",
    "ControlLoop",
    "DEAD_MAN_TIMEOUT_S",
    "EpisodeHeader",
    "EpisodeStep",
    "EpisodeWriter",
    "HOLD",
    "JointSpec",
    "JointTelemetry",
    "LOOP_PERIOD_S",
    "LOOP_RATE_HZ",
    "ObservationFrame",
    "PlannedTransaction",
    "RecordingError",
    "TickReport",
    "baseline_plan",
    "dead_man_check",
    "duplicate_current_read_plan",
    "goal_write_bytes",
    "per_servo_read_bytes",
    "read_episode",
    "telemetry_read_bytes",
    "verify_replay",
]
