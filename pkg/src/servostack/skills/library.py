"""The stock skill set wired for a given joint naming."""

from __future__ import annotations

from .manifest import (
    POLICY,
    SCRIPTED,
    ForceAtLeast,
    JointWithin,
    SkillManifest,
    SkillRegistry,
)
from .routines import PolicyStub, ScriptStep, ScriptedRoutine


def build_default_registry(
    arm_joints: list[str],
    *,
    lift_joint: str = "lift",
    gripper_joint: str = "gripper",
    pick_episode_path=None,
) -> SkillRegistry:
    """set_z and make_coffee always; pick only when a recorded episode exists."""
    registry = SkillRegistry()
    first, second = arm_joints[0], arm_joints[1]

    registry.register(
        SkillManifest(
            name="set_z",
            kind=SCRIPTED,
            schema={"z": "int"},
            success=(JointWithin(lift_joint, tolerance_ticks=5, from_arg="z"),),
        ),
        ScriptedRoutine(lambda args: [ScriptStep({lift_joint: int(args["z"])})]),
    )

    coffee_steps = [
        ScriptStep({first: 2300}, dwell_loops=10),
        ScriptStep({second: 1800}, dwell_loops=10),
        ScriptStep({gripper_joint: 2600}, dwell_loops=15),
        ScriptStep({first: 2048, second: 2048}, dwell_loops=10),
        ScriptStep({gripper_joint: 1200}, dwell_loops=10),
    ]
    registry.register(
        SkillManifest(
            name="make_coffee",
            kind=SCRIPTED,
            pre_pose={first: 2048, second: 2048},
            z_height=1800,
            success=(JointWithin(first, tolerance_ticks=5, target_ticks=2048),),
        ),
        ScriptedRoutine(lambda args: list(coffee_steps)),
    )

    if pick_episode_path is not None:
        stub = PolicyStub(pick_episode_path)
        registry.register(
            SkillManifest(
                name="pick",
                kind=POLICY,
                requires_confirmation=True,
                pre_pose=dict(zip(arm_joints, stub.actions[0])),
                success=(ForceAtLeast(0.6),),
            ),
            stub,
        )

    return registry
