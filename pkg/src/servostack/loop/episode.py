"""Episode files: one line-delimited record per 20 ms loop tick.

The first line is a header carrying the force calibration, joint names,
and loop rate; every later line is one step.  Text and sorted keys keep
files diffable and byte-reproducible for identical runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from servostack.force import ForceCalibration, normalize


class RecordingError(RuntimeError):
    pass


@dataclass(frozen=True)
class EpisodeHeader:
    joints: list[str]
    rate_hz: int = 50
    calibration: ForceCalibration = field(default_factory=ForceCalibration)
    task: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "type": "header",
                "joints": list(self.joints),
                "rate_hz": self.rate_hz,
                "calibration": {
                    "idle_floor_raw": self.calibration.idle_floor_raw,
                    "saturation_raw": self.calibration.saturation_raw,
                },
                "task": self.task,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "EpisodeHeader":
        data = json.loads(line)
        if data.get("type") != "header":
            raise RecordingError("episode file does not start with a header line")
        cal = data["calibration"]
        return cls(
            joints=list(data["joints"]),
            rate_hz=data["rate_hz"],
            calibration=ForceCalibration(cal["idle_floor_raw"], cal["saturation_raw"]),
            task=data.get("task", ""),
        )


@dataclass(frozen=True)
class EpisodeStep:
    t: float
    arm_positions: list[int]
    lift_position: int
    gripper_raw_current: int
    gripper_normalized: float
    action: list[int] | None  # clamped goals written this tick, if any

    def to_json(self) -> str:
        return json.dumps(
            {
                "t": round(self.t, 6),
                "arm_positions": list(self.arm_positions),
                "lift_position": self.lift_position,
                "gripper_raw_current": self.gripper_raw_current,
                "gripper_normalized": round(self.gripper_normalized, 6),
                "action": None if self.action is None else list(self.action),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "EpisodeStep":
        data = json.loads(line)
        return cls(
            t=data["t"],
            arm_positions=list(data["arm_positions"]),
            lift_position=data["lift_position"],
            gripper_raw_current=data["gripper_raw_current"],
            gripper_normalized=data["gripper_normalized"],
            action=None if data["action"] is None else list(data["action"]),
        )


class EpisodeWriter:
    def __init__(self, path: str | Path, header: EpisodeHeader):
        self.path = Path(path)
        self.header = header
        self.steps_written = 0
        self._file = open(self.path, "w", encoding="utf-8", newline="\n")
        self._file.write(header.to_json() + "\n")

    def append(self, step: EpisodeStep) -> None:
        if self._file is None:
            raise RecordingError(f"episode {self.path.name} is closed")
        self._file.write(step.to_json() + "\n")
        self.steps_written += 1

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None

    def __enter__(self) -> "EpisodeWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_episode(path: str | Path) -> tuple[EpisodeHeader, list[EpisodeStep]]:
    with open(path, encoding="utf-8") as f:
        lines = [line for line in f.read().splitlines() if line]
    if not lines:
        raise RecordingError(f"{path}: empty episode file")
    header = EpisodeHeader.from_json(lines[0])
    return header, [EpisodeStep.from_json(line) for line in lines[1:]]


def verify_replay(header: EpisodeHeader, steps: list[EpisodeStep]) -> bool:
    """The stored normalized channel must replay from the raw channel."""
    return all(
        abs(step.gripper_normalized - round(normalize(step.gripper_raw_current, header.calibration), 6))
        < 1e-9
        for step in steps
    )
