"""First protection layer: commanded goals never leave the calibrated range."""

from __future__ import annotations


def clamp_goal(goal: int, min_ticks: int, max_ticks: int) -> int:
    """Clamp a goal position into the joint's calibrated travel.

    Runs on every outgoing goal, upstream of the servo's own angle-limit
    registers, so a bad trajectory is caught before it reaches the wire.
    """
    if min_ticks > max_ticks:
        raise ValueError(f"inverted joint limits: [{min_ticks}, {max_ticks}]")
    if goal < min_ticks:
        return min_ticks
    if goal > max_ticks:
        return max_ticks
    return goal
