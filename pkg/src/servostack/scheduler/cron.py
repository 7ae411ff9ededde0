"""Five-field cron schedules: minute, hour, day-of-month, month, day-of-week.

Day-of-week runs Sunday=0 through Saturday=6, with 7 accepted as another
spelling of Sunday.  Names (``mon``, ``friday``, ``jan``...) work wherever
numbers do.  When both the day-of-month and day-of-week fields are
restricted (anything other than ``*``), a date matches if EITHER field
matches it; otherwise the restricted one decides alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, time, timedelta

_DOW_NAMES = {
    "sun": 0, "sunday": 0,
    "mon": 1, "monday": 1,
    "tue": 2, "tuesday": 2,
    "wed": 3, "wednesday": 3,
    "thu": 4, "thursday": 4,
    "fri": 5, "friday": 5,
    "sat": 6, "saturday": 6,
}
_MONTH_NAMES = {
    "jan": 1, "january": 1,
    "feb": 2, "february": 2,
    "mar": 3, "march": 3,
    "apr": 4, "april": 4,
    "may": 5,
    "jun": 6, "june": 6,
    "jul": 7, "july": 7,
    "aug": 8, "august": 8,
    "sep": 9, "september": 9,
    "oct": 10, "october": 10,
    "nov": 11, "november": 11,
    "dec": 12, "december": 12,
}

_FIELDS = (
    ("minute", 0, 59, {}),
    ("hour", 0, 23, {}),
    ("day-of-month", 1, 31, {}),
    ("month", 1, 12, _MONTH_NAMES),
    ("day-of-week", 0, 7, _DOW_NAMES),
)


class CronSyntaxError(ValueError):
    """Bad schedule text; carries which of the five fields is at fault."""

    def __init__(self, message: str, field: str | None = None, position: int | None = None):
        super().__init__(message)
        self.field = field
        self.position = position  # 1-based field position in the expression


class ScheduleNeverFires(ValueError):
    """The fields are individually valid but no real date satisfies them."""


@dataclass(frozen=True)
class CronSchedule:
    text: str
    minutes: frozenset
    hours: frozenset
    days_of_month: frozenset
    months: frozenset
    days_of_week: frozenset
    dom_restricted: bool
    dow_restricted: bool

    def date_matches(self, day: date) -> bool:
        if day.month not in self.months:
            return False
        dom_ok = day.day in self.days_of_month
        # datetime says Monday=0; shift so Sunday=0
        dow_ok = (day.weekday() + 1) % 7 in self.days_of_week
        if self.dom_restricted and self.dow_restricted:
            return dom_ok or dow_ok
        if self.dom_restricted:
            return dom_ok
        return dow_ok


def _value(token: str, field: str, position: int, lo: int, hi: int, names: dict) -> int:
    lowered = token.lower()
    if lowered in names:
        return names[lowered]
    try:
        value = int(token, 10)
    except ValueError:
        raise CronSyntaxError(
            f"unrecognized token {token!r} in {field} field", field, position
        ) from None
    if not lo <= value <= hi:
        raise CronSyntaxError(
            f"{value} out of range {lo}-{hi} in {field} field", field, position
        )
    return value


def _parse_field(token: str, field: str, position: int, lo: int, hi: int, names: dict) -> set:
    values: set[int] = set()
    for term in token.split(","):
        if not term:
            raise CronSyntaxError(f"empty term in {field} field", field, position)
        step = 1
        if "/" in term:
            term, _, step_text = term.partition("/")
            try:
                step = int(step_text, 10)
            except ValueError:
                raise CronSyntaxError(
                    f"bad step {step_text!r} in {field} field", field, position
                ) from None
            if step < 1:
                raise CronSyntaxError(
                    f"step must be positive in {field} field", field, position
                )
        if term == "*":
            start, stop = lo, hi
        elif "-" in term:
            start_text, _, stop_text = term.partition("-")
            start = _value(start_text, field, position, lo, hi, names)
            stop = _value(stop_text, field, position, lo, hi, names)
            if stop < start:
                raise CronSyntaxError(
                    f"descending range {term!r} in {field} field", field, position
                )
        else:
            start = stop = _value(term, field, position, lo, hi, names)
        values.update(range(start, stop + 1, step))
    return values


def parse_cron(text: str) -> CronSchedule:
    fields = text.split()
    if len(fields) != 5:
        raise CronSyntaxError(
            f"expected 5 fields, got {len(fields)} in {text!r}"
        )
    parsed = []
    for position, (token, (field, lo, hi, names)) in enumerate(zip(fields, _FIELDS), start=1):
        values = _parse_field(token, field, position, lo, hi, names)
        if field == "day-of-week":
            values = {0 if v == 7 else v for v in values}
        parsed.append(frozenset(values))
    return CronSchedule(
        text=text,
        minutes=parsed[0],
        hours=parsed[1],
        days_of_month=parsed[2],
        months=parsed[3],
        days_of_week=parsed[4],
        dom_restricted=fields[2] != "*",
        dow_restricted=fields[4] != "*",
    )


_SCAN_LIMIT_DAYS = 366 * 5


def next_fire(schedule: CronSchedule, after: datetime) -> datetime:
    """First schedule time strictly after ``after``.

    Walks matching dates rather than minutes, so sparse schedules (yearly,
    a single weekday) resolve in at most a few thousand date checks.
    """
    floor = (after + timedelta(minutes=1)).replace(second=0, microsecond=0)
    day = floor.date()
    hours = sorted(schedule.hours)
    minutes = sorted(schedule.minutes)
    for _ in range(_SCAN_LIMIT_DAYS):
        if schedule.date_matches(day):
            for hour in hours:
                for minute in minutes:
                    candidate = datetime.combine(day, time(hour, minute))
                    if candidate >= floor:
                        return candidate
        day += timedelta(days=1)
        floor = datetime.combine(day, time(0, 0))
    raise ScheduleNeverFires(f"{schedule.text!r} matches no date within 5 years")
