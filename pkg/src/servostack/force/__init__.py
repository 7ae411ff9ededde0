"""Grip force estimation from drive current."""

from .estimator import (
    CALIBRATION_MARGIN_RAW,
    ForceCalibration,
    GraspMonitor,
    IDLE_FLOOR_RAW,
    MIN_CALIBRATION_SAMPLES,
    SATURATION_RAW,
    calibrate_idle,
    normalize,
)

__all__ = [
    "CALIBRATION_MARGIN_RAW",
    "ForceCalibration",
    "GraspMonitor",
    "IDLE_FLOOR_RAW",
    "MIN_CALIBRATION_SAMPLES",
    "SATURATION_RAW",
    "calibrate_idle",
    "normalize",
]
