"""The robot's face: one of six expressions, driven by execution signals.

E-stop is absorbing: once shown, nothing but an explicit reset changes
the face, so a red screen can never be papered over by a later success.
"""

from __future__ import annotations

IDLE = "idle"
FOCUSED = "focused"
QUESTIONING = "questioning"
HAPPY = "happy"
ERROR = "error"
ESTOP = "e-stop"

FACES = (IDLE, FOCUSED, QUESTIONING, HAPPY, ERROR, ESTOP)

# signals
DISPATCH = "dispatch"
PENDING_CONFIRMATION = "pending_confirmation"
SUCCESS = "success"
FAILURE = "failure"
HOLD = "hold"
ABORTED = "aborted"
ESTOP_SIGNAL = "estop"
RESET = "reset"

_TRANSITIONS = {
    DISPATCH: FOCUSED,
    PENDING_CONFIRMATION: QUESTIONING,
    SUCCESS: HAPPY,
    FAILURE: ERROR,
    HOLD: ERROR,
    ABORTED: IDLE,
    ESTOP_SIGNAL: ESTOP,
}


def face_after(current: str, signal: str) -> str:
    if current not in FACES:
        raise ValueError(f"unknown face {current!r}")
    if current == ESTOP:
        return IDLE if signal == RESET else ESTOP
    if signal == RESET:
        return IDLE
    return _TRANSITIONS.get(signal, current)


class Face:
    """Holds the current expression and notifies on change only."""

    def __init__(self):
        self.state = IDLE
        self.listeners: list = []

    def signal(self, signal: str) -> str:
        state = face_after(self.state, signal)
        if state != self.state:
            self.state = state
            for listener in list(self.listeners):
                listener(state)
        return self.state

    def set(self, state: str) -> str:
        """Direct override (console request); refused during e-stop."""
        if state not in FACES:
            raise ValueError(f"unknown face {state!r}")
        if self.state == ESTOP:
            return self.state  # absorbing; only a reset signal leaves
        if state != self.state:
            self.state = state
            for listener in list(self.listeners):
                listener(state)
        return self.state
