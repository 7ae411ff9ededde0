"""Clock seam so trigger timing runs against real time or a scripted one."""

from __future__ import annotations

import time as _time
from datetime import datetime, timedelta


class WallClock:
    def now(self) -> datetime:
        return datetime.now()

    def monotonic(self) -> float:
        return _time.monotonic()


class SimClock:
    """Datetime plus a monotonic axis, both advanced by hand."""

    def __init__(self, start: datetime):
        self._now = start
        self._monotonic = 0.0

    def now(self) -> datetime:
        return self._now

    def monotonic(self) -> float:
        return self._monotonic

    def advance(self, seconds: float) -> None:
        if seconds < 0:
            raise ValueError("clocks do not run backwards")
        self._now += timedelta(seconds=seconds)
        self._monotonic += seconds
