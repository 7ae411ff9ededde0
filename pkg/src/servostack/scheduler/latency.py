"""Trigger-to-motion latency accounting on one monotonic axis."""

from __future__ import annotations

import statistics
from dataclasses import dataclass

REACTIVE_BUDGET_S = 0.5
SCHEDULED_BUDGET_S = 10.0

REACTIVE = "reactive"
SCHEDULED = "scheduled"


@dataclass(frozen=True)
class LatencyRecord:
    trigger: str
    source: str  # REACTIVE (hook-fired) or SCHEDULED (cron/heartbeat)
    t_trigger: float
    t_dispatch: float
    t_first_motion: float | None = None

    def __post_init__(self):
        if self.source not in (REACTIVE, SCHEDULED):
            raise ValueError(f"unknown latency source {self.source!r}")
        if self.t_dispatch < self.t_trigger:
            raise ValueError("dispatch cannot precede its trigger")
        if self.t_first_motion is not None and self.t_first_motion < self.t_dispatch:
            raise ValueError("first motion cannot precede dispatch")

    @property
    def dispatch_latency_s(self) -> float:
        return self.t_dispatch - self.t_trigger

    @property
    def total_latency_s(self) -> float:
        """Trigger to first motion when motion happened, else to dispatch."""
        end = self.t_first_motion if self.t_first_motion is not None else self.t_dispatch
        return end - self.t_trigger


def latency_report(records: list[LatencyRecord]) -> dict:
    """Mean and median latencies per source, plus over-budget offenders.

    Reactive triggers answer to a 0.5 s line, scheduled ones to 10 s,
    both judged on total latency.  Raises on an empty record set so a
    silent instrumentation failure cannot read as a healthy report.
    """
    if not records:
        raise ValueError("no latency records to report on")
    report: dict = {}
    budgets = {REACTIVE: REACTIVE_BUDGET_S, SCHEDULED: SCHEDULED_BUDGET_S}
    for source, budget in budgets.items():
        rows = [r for r in records if r.source == source]
        if not rows:
            continue
        dispatch = [r.dispatch_latency_s for r in rows]
        total = [r.total_latency_s for r in rows]
        report[source] = {
            "count": len(rows),
            "budget_s": budget,
            "dispatch_s": {
                "mean": statistics.mean(dispatch),
                "median": statistics.median(dispatch),
            },
            "total_s": {
                "mean": statistics.mean(total),
                "median": statistics.median(total),
            },
            "over_budget": [r.trigger for r in rows if r.total_latency_s > budget],
        }
    return report
