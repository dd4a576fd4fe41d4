"""
Back Stack
Launch-mode semantics for the activity back stack
"""

from dataclasses import dataclass
from typing import Tuple

from core.exceptions import EmptyBackStackError


@dataclass(frozen=True)
class InstanceRef:
    """A live activity instance; serial distinguishes repeated launches."""

    activity: str
    serial: int

    def __str__(self) -> str:
        return f"{self.activity}#{self.serial}"


# bottom -> top
BackStack = Tuple[InstanceRef, ...]


def push_for_launch(stack: BackStack, activity: str, launch_mode: str, serial: int) -> Tuple[BackStack, bool]:
    """
    Apply a launch of `activity` to the stack.

    Args:
        stack: Current back stack
        activity: Activity being launched
        launch_mode: Standard, SingleTop or SingleTask
        serial: Serial to use if a new instance is created

    Returns:
        (new stack, whether a new instance was created)
    """
    if launch_mode == "SingleTop" and stack and stack[-1].activity == activity:
        return stack, False

    if launch_mode == "SingleTask":
        # topmost existing instance; everything above it is destroyed
        for index in range(len(stack) - 1, -1, -1):
            if stack[index].activity == activity:
                return stack[:index + 1], False

    return stack + (InstanceRef(activity, serial),), True


def pop_back(stack: BackStack) -> BackStack:
    """Back event: drop the top instance."""
    if not stack:
        raise EmptyBackStackError("Back pressed on an empty back stack")
    return stack[:-1]


def finish_top(stack: BackStack) -> BackStack:
    """Finish effect: the running (top) activity finishes itself."""
    if not stack:
        raise EmptyBackStackError("Finish requested on an empty back stack")
    return stack[:-1]


def activity_ids(stack: BackStack) -> Tuple[str, ...]:
    return tuple(ref.activity for ref in stack)
