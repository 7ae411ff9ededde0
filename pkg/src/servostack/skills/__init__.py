from .face import ESTOP, FACES, FOCUSED, HAPPY, IDLE, QUESTIONING, Face, face_after
from .face import ERROR as FACE_ERROR
from .library import build_default_registry
from .manifest import (
    POLICY,
    SCRIPTED,
    ForceAtLeast,
    JointWithin,
    SkillManifest,
    SkillRegistry,
)
from .routines import PolicyRun, PolicyStub, ScriptRun, ScriptStep, ScriptedRoutine
from .runtime import (
    ABORTED,
    FAILED,
    PENDING_CONFIRMATION,
    PHASES,
    POSITIONING,
    PROTOCOL_VERSION,
    RUNNING,
    SUCCEEDED,
    Execution,
    SkillRuntime,
)

__all__ = [
    "ABORTED",
    "ESTOP",
    "FACES",
    "FACE_ERROR",
    "FAILED",
    "FOCUSED",
    "Face",
    "ForceAtLeast",
    "HAPPY",
    "IDLE",
    "JointWithin",
    "PENDING_CONFIRMATION",
    "PHASES",
    "POLICY",
    "POSITIONING",
    "PROTOCOL_VERSION",
    "PolicyRun",
    "PolicyStub",
    "QUESTIONING",
    "RUNNING",
    "SCRIPTED",
    "SUCCEEDED",
    "ScriptRun",
    "ScriptStep",
    "ScriptedRoutine",
    "SkillManifest",
    "SkillRegistry",
    "SkillRuntime",
    "Execution",
    "build_default_registry",
    "face_after",
]
