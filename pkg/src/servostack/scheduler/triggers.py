"""Proactive trigger engine: cron schedules, event hooks, heartbeats.

All three resolve to the same thing, a dispatch asking the skill runtime
to run a named skill with arguments.  Cron and heartbeat triggers fire
from ``poll``; hooks fire from ``deliver`` in registration order.  An
event no enabled hook claims is logged and dropped, never queued.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta

from .clock import WallClock
from .cron import CronSchedule, next_fire, parse_cron

logger = logging.getLogger("servostack.triggers")

MIN_HEARTBEAT_PERIOD_S = 1.0
HEARTBEAT_JITTER_FRACTION = 0.05


@dataclass(frozen=True)
class Dispatch:
    trigger: str
    source: str  # "cron" | "heartbeat" | "hook"
    skill: str
    args: dict
    scheduled_for: datetime
    fired_at: datetime

    @property
    def latency_s(self) -> float:
        return (self.fired_at - self.scheduled_for).total_seconds()


@dataclass
class _Cron:
    name: str
    skill: str
    args: dict
    enabled: bool
    schedule: CronSchedule
    next_due: datetime
    source = "cron"


@dataclass
class _Heartbeat:
    name: str
    skill: str
    args: dict
    enabled: bool
    period_s: float
    next_due: datetime
    source = "heartbeat"


@dataclass
class _Hook:
    name: str
    skill: str
    args: dict
    enabled: bool
    event: str
    source = "hook"


@dataclass(frozen=True)
class DroppedEvent:
    t: datetime
    event: str


@dataclass
class TriggerEngine:
    clock: object = field(default_factory=WallClock)
    seed: int = 0

    def __post_init__(self):
        self._rng = random.Random(self.seed)
        self._triggers: dict[str, object] = {}
        self.history: list[Dispatch] = []
        self.dropped: list[DroppedEvent] = []

    # --- registration ---

    def _claim_name(self, name: str) -> None:
        if name in self._triggers:
            raise ValueError(f"trigger {name!r} already registered")

    def add_cron(self, name: str, schedule: str, skill: str, args: dict | None = None,
                 enabled: bool = True) -> None:
        self._claim_name(name)
        parsed = parse_cron(schedule)
        self._triggers[name] = _Cron(
            name, skill, dict(args or {}), enabled, parsed,
            next_due=next_fire(parsed, self.clock.now()),
        )

    def add_heartbeat(self, name: str, period_s: float, skill: str,
                      args: dict | None = None, enabled: bool = True) -> None:
        self._claim_name(name)
        if period_s < MIN_HEARTBEAT_PERIOD_S:
            raise ValueError(
                f"heartbeat period {period_s} s below the {MIN_HEARTBEAT_PERIOD_S} s floor"
            )
        self._triggers[name] = _Heartbeat(
            name, skill, dict(args or {}), enabled, period_s,
            next_due=self.clock.now() + self._jittered(period_s),
        )

    def add_hook(self, name: str, event: str, skill: str, args: dict | None = None,
                 enabled: bool = True) -> None:
        self._claim_name(name)
        self._triggers[name] = _Hook(name, skill, dict(args or {}), enabled, event)

    def enable(self, name: str, on: bool = True) -> None:
        trigger = self._triggers[name]
        was_off = not trigger.enabled
        trigger.enabled = on
        if on and was_off:
            # reschedule forward; a trigger must not fire for time spent disabled
            now = self.clock.now()
            if isinstance(trigger, _Cron):
                trigger.next_due = next_fire(trigger.schedule, now)
            elif isinstance(trigger, _Heartbeat):
                trigger.next_due = now + self._jittered(trigger.period_s)

    # --- firing ---

    def poll(self, now: datetime | None = None) -> list[Dispatch]:
        now = now or self.clock.now()
        fired = []
        for trigger in self._triggers.values():
            if not trigger.enabled or isinstance(trigger, _Hook):
                continue
            if now < trigger.next_due:
                continue
            dispatch = Dispatch(
                trigger=trigger.name,
                source=trigger.source,
                skill=trigger.skill,
                args=dict(trigger.args),
                scheduled_for=trigger.next_due,
                fired_at=now,
            )
            # one catch-up fire at most; missed occurrences are skipped
            if isinstance(trigger, _Cron):
                trigger.next_due = next_fire(trigger.schedule, now)
            else:
                trigger.next_due = now + self._jittered(trigger.period_s)
            fired.append(dispatch)
        self.history.extend(fired)
        return fired

    def deliver(self, event: str, payload: dict | None = None,
                now: datetime | None = None) -> list[Dispatch]:
        now = now or self.clock.now()
        fired = []
        for trigger in self._triggers.values():
            if isinstance(trigger, _Hook) and trigger.enabled and trigger.event == event:
                fired.append(
                    Dispatch(
                        trigger=trigger.name,
                        source="hook",
                        skill=trigger.skill,
                        args={**trigger.args, **(payload or {})},
                        scheduled_for=now,
                        fired_at=now,
                    )
                )
        if not fired:
            self.dropped.append(DroppedEvent(now, event))
            logger.info("no enabled hook for event %r; dropped", event)
        self.history.extend(fired)
        return fired

    # --- inspection ---

    def upcoming(self, count: int = 5, now: datetime | None = None) -> dict[str, list[datetime]]:
        """Next fire times per periodic trigger, without touching live state.

        Heartbeat times are nominal (no jitter preview); hooks are omitted
        because they have no schedule.
        """
        now = now or self.clock.now()
        out: dict[str, list[datetime]] = {}
        for trigger in self._triggers.values():
            if isinstance(trigger, _Cron):
                times, cursor = [], now
                for _ in range(count):
                    cursor = next_fire(trigger.schedule, cursor)
                    times.append(cursor)
                out[trigger.name] = times
            elif isinstance(trigger, _Heartbeat):
                out[trigger.name] = [
                    now + timedelta(seconds=trigger.period_s * k)
                    for k in range(1, count + 1)
                ]
        return out

    def describe(self) -> list[dict]:
        rows = []
        for trigger in self._triggers.values():
            row = {
                "name": trigger.name,
                "source": trigger.source,
                "skill": trigger.skill,
                "enabled": trigger.enabled,
            }
            if isinstance(trigger, _Cron):
                row["schedule"] = trigger.schedule.text
            elif isinstance(trigger, _Heartbeat):
                row["period_s"] = trigger.period_s
            else:
                row["event"] = trigger.event
            rows.append(row)
        return rows

    def _jittered(self, period_s: float) -> timedelta:
        spread = self._rng.uniform(-HEARTBEAT_JITTER_FRACTION, HEARTBEAT_JITTER_FRACTION)
        return timedelta(seconds=period_s * (1.0 + spread))
