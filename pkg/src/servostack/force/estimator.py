"""Sensorless grip force from the current register the loop already reads.

No load cell: squeeze force shows up as drive current, so a normalized
estimate falls out of two calibration points, the idle friction floor and
the current at which the grasp controller folds into its holding state.
The estimator consumes the telemetry the control loop fetched anyway; it
never issues bus traffic of its own.
"""

from __future__ import annotations

from dataclasses import dataclass

IDLE_FLOOR_RAW = 20.0
SATURATION_RAW = 90.0
CALIBRATION_MARGIN_RAW = 2.0
MIN_CALIBRATION_SAMPLES = 3


@dataclass(frozen=True)
class ForceCalibration:
    idle_floor_raw: float = IDLE_FLOOR_RAW
    saturation_raw: float = SATURATION_RAW

    def __post_init__(self):
        if self.saturation_raw <= self.idle_floor_raw:
            raise ValueError(
                f"saturation {self.saturation_raw} must sit above the "
                f"idle floor {self.idle_floor_raw}"
            )


def normalize(current_raw: float, calibration: ForceCalibration | None = None) -> float:
    """Map a signed raw current to grip force in [0, 1]."""
    cal = calibration or ForceCalibration()
    span = cal.saturation_raw - cal.idle_floor_raw
    value = (abs(current_raw) - cal.idle_floor_raw) / span
    return min(max(value, 0.0), 1.0)


def calibrate_idle(
    samples: list[float], margin: float = CALIBRATION_MARGIN_RAW
) -> ForceCalibration:
    """Set the floor just above what an unloaded, resting gripper reads."""
    if len(samples) < MIN_CALIBRATION_SAMPLES:
        raise ValueError(
            f"need at least {MIN_CALIBRATION_SAMPLES} idle samples, got {len(samples)}"
        )
    floor = max(abs(s) for s in samples) + margin
    return ForceCalibration(idle_floor_raw=floor)


class GraspMonitor:
    """Checks that force saturation and the stall declaration coincide.

    A healthy grasp saturates the estimate and trips the stall detector
    within a few loop ticks of each other; a large gap means the two
    thresholds have drifted apart.
    """

    def __init__(self, tolerance_loops: int = 15):
        self.tolerance_loops = tolerance_loops
        self.saturation_loop: int | None = None
        self.stall_loop: int | None = None

    def observe(self, loop_index: int, normalized: float, stall_declared: bool) -> None:
        if self.saturation_loop is None and normalized >= 1.0:
            self.saturation_loop = loop_index
        if self.stall_loop is None and stall_declared:
            self.stall_loop = loop_index

    @property
    def gap_loops(self) -> int | None:
        if self.saturation_loop is None or self.stall_loop is None:
            return None
        return self.stall_loop - self.saturation_loop

    @property
    def coincident(self) -> bool:
        gap = self.gap_loops
        return gap is not None and abs(gap) <= self.tolerance_loops
