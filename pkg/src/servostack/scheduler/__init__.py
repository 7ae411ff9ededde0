from .clock import SimClock, WallClock
from .cron import (
    CronSchedule,
    CronSyntaxError,
    ScheduleNeverFires,
    next_fire,
    parse_cron,
)
from .latency import (
    REACTIVE,
    REACTIVE_BUDGET_S,
    SCHEDULED,
    SCHEDULED_BUDGET_S,
    LatencyRecord,
    latency_report,
)
from .triggers import (
    HEARTBEAT_JITTER_FRACTION,
    MIN_HEARTBEAT_PERIOD_S,
    Dispatch,
    DroppedEvent,
    TriggerEngine,
)

__all__ = [
    "CronSchedule",
    "CronSyntaxError",
    "Dispatch",
    "DroppedEvent",
    "HEARTBEAT_JITTER_FRACTION",
    "LatencyRecord",
    "MIN_HEARTBEAT_PERIOD_S",
    "REACTIVE",
    "REACTIVE_BUDGET_S",
    "SCHEDULED",
    "SCHEDULED_BUDGET_S",
    "ScheduleNeverFires",
    "SimClock",
    "TriggerEngine",
    "WallClock",
    "latency_report",
    "next_fire",
    "parse_cron",
]
