"""Runnable skill bodies: scripted goal sequences and recorded-policy replay."""

from __future__ import annotations

from dataclasses import dataclass

from servostack.loop.episode import read_episode

POLICY_RATE_HZ = 10
LOOPS_PER_POLICY_STEP = 5  # 50 Hz loop / 10 Hz policy


@dataclass(frozen=True)
class ScriptStep:
    goals: dict  # joint name -> ticks
    dwell_loops: int = 0  # loops to sit after issuing before the next step


class ScriptRun:
    """Cursor over a step list; one call per loop tick."""

    def __init__(self, steps: list[ScriptStep]):
        self.steps = list(steps)
        self.index = 0
        self.dwell = 0
        self.issued = False

    def tick(self) -> tuple[dict | None, bool]:
        """Returns (goals to submit or None, finished)."""
        if self.index >= len(self.steps):
            return None, True
        step = self.steps[self.index]
        if not self.issued:
            self.issued = True
            self.dwell = step.dwell_loops
            return dict(step.goals), False
        if self.dwell > 0:
            self.dwell -= 1
            return None, False
        self.index += 1
        self.issued = False
        return self.tick()


class ScriptedRoutine:
    """Builds a fresh ScriptRun per invocation; ``build`` maps args to steps."""

    def __init__(self, build):
        self._build = build

    def start(self, args: dict, arm_joints: list[str]) -> ScriptRun:
        return ScriptRun(self._build(args))


class PolicyRun:
    """Replays recorded actions at 10 Hz against the 50 Hz loop."""

    def __init__(self, actions: list[list[int]], joint_names: list[str]):
        self.actions = actions
        self.joint_names = joint_names
        self.loop = 0
        self.cursor = 0

    def tick(self) -> tuple[dict | None, bool]:
        if self.cursor >= len(self.actions):
            return None, True
        goals = None
        if self.loop % LOOPS_PER_POLICY_STEP == 0:
            action = self.actions[self.cursor]
            goals = dict(zip(self.joint_names, action))
            self.cursor += 1
        self.loop += 1
        return goals, False


class PolicyStub:
    """Stands in for a learned policy by replaying one recorded episode."""

    def __init__(self, episode_path):
        header, steps = read_episode(episode_path)
        self.header = header
        self.actions = [step.action for step in steps if step.action is not None]
        if not self.actions:
            raise ValueError(f"{episode_path}: episode has no recorded actions")

    def start(self, args: dict, arm_joints: list[str]) -> PolicyRun:
        if len(arm_joints) != len(self.actions[0]):
            raise ValueError(
                f"episode actions carry {len(self.actions[0])} joints, "
                f"robot exposes {len(arm_joints)}"
            )
        return PolicyRun(self.actions, arm_joints)
