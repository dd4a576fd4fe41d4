"""
Exception types raised by the stackwise engine
"""

from typing import List, Optional


class StackwiseError(Exception):
    """Base class for all engine errors."""


class SpecParseError(StackwiseError):
    """The app spec document is not well-formed."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")


class SpecValidationError(StackwiseError):
    """The app spec parsed but violates one or more invariants."""

    def __init__(self, issues: List):
        self.issues = list(issues)
        lines = "; ".join(str(issue) for issue in self.issues)
        super().__init__(f"{len(self.issues)} validation error(s): {lines}")


class EmptyBackStackError(StackwiseError):
    """Pop or finish requested on an empty back stack."""


class TerminatedStateError(StackwiseError):
    """The runtime state is terminal and cannot be observed or fired."""


class InapplicableEventError(StackwiseError):
    """The event is not applicable in the current runtime state."""

    def __init__(self, event, activity: str):
        self.event = event
        self.activity = activity
        super().__init__(f"Event {event} is not applicable on {activity}")


class ReplayDivergenceError(StackwiseError):
    """A recorded access sequence no longer reaches its state."""


class StateExplosionError(StackwiseError):
    """Exhaustive exploration exceeded its state cap."""

    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"State count exceeded cap of {cap}")


class UnknownLabelError(StackwiseError):
    """A target names labels the app never emits."""

    def __init__(self, labels):
        self.labels = sorted(labels)
        super().__init__(f"Unknown label(s): {', '.join(self.labels)}")


class ModelFormatError(StackwiseError):
    """A serialized model document cannot be loaded."""
