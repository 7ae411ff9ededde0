"""Bus-time budget: predicts whether a tick's traffic fits the loop period.

Every transaction costs a fixed USB-serial round-trip overhead plus wire
time per byte.  The loop claims at most a configured fraction of its period
for bus traffic; plans past that line are flagged before they ever run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Protocol

INSTRUCTION_OVERHEAD_BYTES = 6  # header, id, length, instruction, checksum
STATUS_OVERHEAD_BYTES = 6


class WireCost(Protocol):
    total_bytes: int


@dataclass(frozen=True)
class PlannedTransaction:
    kind: str  # "read" or "write"
    total_bytes: int


@dataclass(frozen=True)
class BudgetVerdict:
    ok: bool
    predicted_ms: float
    budget_ms: float
    transactions: int
    total_bytes: int

    @property
    def label(self) -> str:
        return "PASS" if self.ok else "FAIL"


@dataclass(frozen=True)
class BusBudgetModel:
    per_transaction_overhead_ms: float = 2.5
    byte_time_ms: float = 0.01  # 1 Mbaud, ~10 bits per byte on the wire
    loop_period_ms: float = 20.0
    safety_factor: float = 0.8

    @property
    def budget_ms(self) -> float:
        return self.loop_period_ms * self.safety_factor

    def transaction_ms(self, total_bytes: int) -> float:
        return self.per_transaction_overhead_ms + total_bytes * self.byte_time_ms

    def predict_ms(self, plan: Iterable[WireCost]) -> float:
        return sum(self.transaction_ms(t.total_bytes) for t in plan)

    def check(self, plan: Iterable[WireCost]) -> BudgetVerdict:
        plan = list(plan)
        predicted = self.predict_ms(plan)
        return BudgetVerdict(
            ok=predicted <= self.budget_ms,
            predicted_ms=predicted,
            budget_ms=self.budget_ms,
            transactions=len(plan),
            total_bytes=sum(t.total_bytes for t in plan),
        )


def telemetry_read_bytes(servo_count: int, span: int = 15) -> int:
    """One sync read covering position through current, with all replies."""
    request = INSTRUCTION_OVERHEAD_BYTES + 2 + servo_count
    replies = servo_count * (STATUS_OVERHEAD_BYTES + span)
    return request + replies


def goal_write_bytes(servo_count: int, width: int = 2) -> int:
    """One sync write of a width-byte register per servo; no replies."""
    return INSTRUCTION_OVERHEAD_BYTES + 2 + servo_count * (1 + width)


def per_servo_read_bytes(span: int = 2) -> int:
    """A single-servo read plus its status reply."""
    return INSTRUCTION_OVERHEAD_BYTES + 2 + STATUS_OVERHEAD_BYTES + span


def baseline_plan(servo_count: int) -> list[PlannedTransaction]:
    """The per-tick contract: one telemetry sync read, one goal sync write."""
    return [
        PlannedTransaction("read", telemetry_read_bytes(servo_count)),
        PlannedTransaction("write", goal_write_bytes(servo_count)),
    ]


def duplicate_current_read_plan(servo_count: int) -> list[PlannedTransaction]:
    """The naive alternative: poll each servo's current register separately.

    This is what a driver without sync-read support does, and it is the
    plan the budget check exists to reject.
    """
    plan = baseline_plan(servo_count)
    plan += [
        PlannedTransaction("read", per_servo_read_bytes()) for _ in range(servo_count)
    ]
    return plan
