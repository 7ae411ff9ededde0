"""Skill manifests: what a skill needs before, during, and after a run.

A manifest is pure data so the runtime, the CLI, and the console can all
reason about a skill without importing its implementation.  Success is
declared the same way: small predicate records the runtime evaluates
against live telemetry, not callbacks buried in skill code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

SCRIPTED = "scripted"
POLICY = "policy"

_ARG_TYPES = {"int": int, "float": (int, float), "str": str, "bool": bool}


@dataclass(frozen=True)
class JointWithin:
    """Succeeds when a joint settles near a target.

    The target comes from the named argument when ``from_arg`` is set,
    otherwise from ``target_ticks``.
    """

    joint: str
    tolerance_ticks: int = 5
    from_arg: str | None = None
    target_ticks: int | None = None

    def resolve_target(self, args: dict) -> int:
        if self.from_arg is not None:
            return int(args[self.from_arg])
        if self.target_ticks is None:
            raise ValueError(f"no target for joint {self.joint!r}")
        return self.target_ticks


@dataclass(frozen=True)
class ForceAtLeast:
    """Succeeds when the normalized grip force is at or above a floor."""

    minimum_normalized: float = 0.6


SuccessCheck = JointWithin | ForceAtLeast


@dataclass(frozen=True)
class SkillManifest:
    name: str
    kind: str  # SCRIPTED or POLICY
    schema: dict = field(default_factory=dict)  # arg name -> "int"|"float"|"str"|"bool"
    pre_pose: dict | None = None  # joint name -> ticks, taken before running
    z_height: int | None = None  # lift target folded into the pre-pose
    requires_confirmation: bool = False
    success: tuple = ()  # SuccessCheck records, all must pass

    def __post_init__(self):
        if self.kind not in (SCRIPTED, POLICY):
            raise ValueError(f"unknown skill kind {self.kind!r}")
        bad = [t for t in self.schema.values() if t not in _ARG_TYPES]
        if bad:
            raise ValueError(f"unknown schema types {bad} in skill {self.name!r}")

    def validate_args(self, args: dict) -> list[str]:
        """Human-readable problems; empty means the args are acceptable."""
        problems = []
        for name in args:
            if name not in self.schema:
                problems.append(f"unexpected argument {name!r}")
        for name, type_name in self.schema.items():
            if name not in args:
                problems.append(f"missing argument {name!r}")
                continue
            value = args[name]
            # bool subclasses int, so keep the two from bleeding together
            wrong_type = not isinstance(value, _ARG_TYPES[type_name])
            bool_mismatch = isinstance(value, bool) != (type_name == "bool")
            if wrong_type or bool_mismatch:
                problems.append(f"argument {name!r} must be {type_name}")
        return problems


class SkillRegistry:
    """Name-indexed manifests plus the runnable routine behind each."""

    def __init__(self):
        self._manifests: dict[str, SkillManifest] = {}
        self._routines: dict[str, object] = {}

    def register(self, manifest: SkillManifest, routine) -> None:
        if manifest.name in self._manifests:
            raise ValueError(f"skill {manifest.name!r} already registered")
        self._manifests[manifest.name] = manifest
        self._routines[manifest.name] = routine

    def manifest(self, name: str) -> SkillManifest:
        return self._manifests[name]

    def routine(self, name: str):
        return self._routines[name]

    def __contains__(self, name: str) -> bool:
        return name in self._manifests

    def names(self) -> list[str]:
        return list(self._manifests)

    def describe(self) -> list[dict]:
        rows = []
        for manifest in self._manifests.values():
            rows.append(
                {
                    "name": manifest.name,
                    "kind": manifest.kind,
                    "schema": dict(manifest.schema),
                    "requires_confirmation": manifest.requires_confirmation,
                }
            )
        return rows
