"""
Simulated Runtime
Deterministic execution of an app spec: events, effects, statuses and back stack
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from core.app_spec import (
    EVENT_KINDS,
    GLOBAL,
    ActivityDef,
    AppSpec,
    Event,
    Finish,
    Quit,
    SetStatus,
    StartActivity,
    StatusMap,
    events_for_view,
)
from core.back_stack import BackStack, InstanceRef, activity_ids, finish_top, pop_back, push_for_launch
from core.exceptions import InapplicableEventError, TerminatedStateError
from utils.logger import get_logger

logger = get_logger(__name__)

# (view id, status) pairs in declaration order, one tuple per stack entry
ViewStatuses = Tuple[Tuple[str, StatusMap], ...]


@dataclass(frozen=True)
class RuntimeState:
    """
    Immutable snapshot of the running app.

    statuses is aligned with stack: statuses[i] belongs to stack[i].
    """

    spec: AppSpec = field(compare=False, repr=False)
    stack: BackStack
    statuses: Tuple[ViewStatuses, ...]
    terminated: bool = False
    next_serial: int = 2

    def state_key(self) -> Tuple:
        """Exact identity of the running app, instance serials excluded."""
        return (
            self.terminated,
            tuple((ref.activity, views) for ref, views in zip(self.stack, self.statuses)),
        )

    @property
    def top(self) -> InstanceRef:
        return self.stack[-1]


@dataclass(frozen=True)
class ViewSnapshot:
    id: str
    view_type: str
    position: Tuple[int, int]
    status: StatusMap

    def sort_key(self) -> Tuple:
        return (self.position, self.id)

    def to_dict(self) -> Dict:
        return {
            "id": self.id,
            "view_type": self.view_type,
            "position": list(self.position),
            "status": self.status.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "ViewSnapshot":
        return cls(data["id"], data["view_type"], tuple(data["position"]), StatusMap.of(data.get("status")))


@dataclass(frozen=True)
class Observation:
    activity: str
    views: Tuple[ViewSnapshot, ...]
    stack_snapshot: Tuple[str, ...]
    applicable_events: Tuple[Event, ...]


@dataclass(frozen=True)
class FireResult:
    next: RuntimeState
    emitted: FrozenSet[str]
    started_new_activity: bool


@dataclass(frozen=True)
class TraceStep:
    index: int
    observation: Observation
    event: Event
    emitted: FrozenSet[str]
    stack_after: Tuple[str, ...]


@dataclass(frozen=True)
class Trace:
    """
    Result of replaying an event sequence from a fresh start.

    infeasible_at is the index of the first event that could not be fired,
    or None when every event fired.
    """

    steps: Tuple[TraceStep, ...]
    final_observation: Optional[Observation]
    infeasible_at: Optional[int] = None
    final_state: Optional[RuntimeState] = field(default=None, compare=False, repr=False)

    @property
    def feasible(self) -> bool:
        return self.infeasible_at is None

    @property
    def terminated(self) -> bool:
        return self.final_state is not None and self.final_state.terminated

    @property
    def emitted(self) -> FrozenSet[str]:
        labels = set()
        for step in self.steps:
            labels.update(step.emitted)
        return frozenset(labels)

    def stack_transcript(self) -> List[Tuple[str, ...]]:
        """Back stack before the first event, then after each event."""
        if not self.steps:
            return [self.final_observation.stack_snapshot] if self.final_observation else []
        transcript = [self.steps[0].observation.stack_snapshot]
        transcript.extend(step.stack_after for step in self.steps)
        return transcript


def _initial_statuses(activity: ActivityDef) -> ViewStatuses:
    return tuple((view.id, view.initial_status) for view in activity.views)


def start(spec: AppSpec) -> RuntimeState:
    """
    Launch the app: the entry activity becomes the only stack entry.

    Args:
        spec: Validated app spec

    Returns:
        Fresh runtime state
    """
    entry = spec.activity(spec.entry_activity)
    return RuntimeState(
        spec=spec,
        stack=(InstanceRef(entry.id, 1),),
        statuses=(_initial_statuses(entry),),
    )


def observe(state: RuntimeState) -> Observation:
    """
    Project the top activity into what a tester sees.

    Args:
        state: Non-terminated runtime state

    Returns:
        Visible views sorted by (position, id) and the applicable events in
        canonical order, global events last
    """
    if state.terminated:
        raise TerminatedStateError("Cannot observe a terminated app")

    spec = state.spec
    activity = spec.activity(state.top.activity)
    statuses = dict(state.statuses[-1])

    visible = sorted(
        (view for view in activity.views if view.is_visible(statuses)),
        key=lambda view: (view.position, view.id),
    )
    snapshots = tuple(
        ViewSnapshot(view.id, view.view_type, view.position, statuses[view.id]) for view in visible
    )

    events: List[Event] = []
    for view in visible:
        if statuses[view.id].get("enabled") is False:
            continue
        events.extend(events_for_view(view, spec.text_palette))
    events.extend(Event(GLOBAL, kind) for kind in EVENT_KINDS if kind in spec.global_events)

    return Observation(
        activity=activity.id,
        views=snapshots,
        stack_snapshot=activity_ids(state.stack),
        applicable_events=tuple(events),
    )


class _Execution:
    """Mutable working copy used while applying one event."""

    def __init__(self, state: RuntimeState):
        self.spec = state.spec
        self.stack: List[InstanceRef] = list(state.stack)
        self.statuses: List[Dict[str, StatusMap]] = [dict(views) for views in state.statuses]
        self.next_serial = state.next_serial
        self.terminated = state.terminated
        self.started_new = False

    def index_of(self, ref: InstanceRef) -> Optional[int]:
        for index, entry in enumerate(self.stack):
            if entry == ref:
                return index
        return None

    def topmost(self, activity: str) -> Optional[int]:
        for index in range(len(self.stack) - 1, -1, -1):
            if self.stack[index].activity == activity:
                return index
        return None

    def set_status(self, index: int, view: str, attribute: str, value):
        current = self.statuses[index].get(view)
        if current is None:
            return
        self.statuses[index][view] = current.with_value(attribute, value)

    def launch(self, activity_id: str):
        activity = self.spec.activity(activity_id)
        stack, started = push_for_launch(tuple(self.stack), activity.id, activity.launch_mode, self.next_serial)
        if started:
            self.next_serial += 1
            self.statuses.append(dict(_initial_statuses(activity)))
            self.started_new = True
        else:
            del self.statuses[len(stack):]
        self.stack = list(stack)

    def pop(self, finishing: bool = False):
        stack = finish_top(tuple(self.stack)) if finishing else pop_back(tuple(self.stack))
        self.stack = list(stack)
        self.statuses.pop()
        if not self.stack:
            self.terminated = True

    def quit(self):
        self.stack = []
        self.statuses = []
        self.terminated = True

    def freeze(self) -> RuntimeState:
        return RuntimeState(
            spec=self.spec,
            stack=tuple(self.stack),
            statuses=tuple(tuple(views.items()) for views in self.statuses),
            terminated=self.terminated,
            next_serial=self.next_serial,
        )


def _apply_intrinsic(execution: _Execution, index: int, view_type: str, event: Event):
    """Built-in widget behaviour, applied before handler effects."""
    status = execution.statuses[index].get(event.view)
    if status is None:
        return
    if view_type == "CheckBox" and event.kind == "Click":
        execution.set_status(index, event.view, "checked", not status.get("checked", False))
    elif view_type == "RadioButton" and event.kind == "Click":
        execution.set_status(index, event.view, "checked", True)
    elif event.kind == "ClearText":
        execution.set_status(index, event.view, "text", "")
    elif event.kind == "TypeText":
        execution.set_status(index, event.view, "text", execution.spec.text_palette[event.payload])
    elif event.kind == "SetValue":
        execution.set_status(index, event.view, "value", event.payload)


def fire(state: RuntimeState, event: Event) -> FireResult:
    """
    Fire one event and apply the matching handler.

    Args:
        state: Current runtime state (never mutated)
        event: Event from observe(state).applicable_events

    Returns:
        FireResult with the next state and the emitted labels

    Raises:
        InapplicableEventError: event is not applicable in this state
    """
    observation = observe(state)
    if event not in observation.applicable_events:
        raise InapplicableEventError(event, observation.activity)

    spec = state.spec
    firing = state.top
    activity = spec.activity(firing.activity)
    handler = activity.find_handler(dict(state.statuses[-1]), event)

    execution = _Execution(state)
    if not event.is_global:
        _apply_intrinsic(execution, len(execution.stack) - 1, activity.view(event.view).view_type, event)

    for effect in handler.effects if handler else ():
        if execution.terminated:
            break
        if isinstance(effect, SetStatus):
            if effect.activity is None:
                index = execution.index_of(firing)
            else:
                index = execution.topmost(effect.activity)
            if index is not None:
                execution.set_status(index, effect.view, effect.attribute, effect.value)
        elif isinstance(effect, StartActivity):
            execution.launch(effect.activity)
        elif isinstance(effect, Finish):
            execution.pop(finishing=True)
        elif isinstance(effect, Quit):
            execution.quit()

    if event.kind == "Back" and not execution.terminated:
        execution.pop()

    emitted = handler.emits if handler else frozenset()
    if emitted:
        logger.debug(f"{firing.activity}: {event} emitted {', '.join(sorted(emitted))}")

    return FireResult(next=execution.freeze(), emitted=emitted, started_new_activity=execution.started_new)


def replay(spec: AppSpec, sequence: Sequence[Event]) -> Trace:
    """
    Start the app fresh and fire `sequence` in order.

    Args:
        spec: Validated app spec
        sequence: Events to fire

    Returns:
        Trace of the run; infeasible_at marks the first inapplicable event
        (including any event after the app terminated)
    """
    state = start(spec)
    steps: List[TraceStep] = []

    for index, event in enumerate(sequence):
        if state.terminated:
            return Trace(tuple(steps), None, index, state)
        observation = observe(state)
        if event not in observation.applicable_events:
            return Trace(tuple(steps), observation, index, state)
        result = fire(state, event)
        state = result.next
        steps.append(TraceStep(index, observation, event, result.emitted, activity_ids(state.stack)))

    final_observation = None if state.terminated else observe(state)
    return Trace(tuple(steps), final_observation, None, state)


def format_trace(trace: Trace) -> List[str]:
    """Line-oriented trace log, one record per fired event."""
    lines = []
    for step in trace.steps:
        labels = ",".join(sorted(step.emitted)) or "-"
        stack = "/".join(step.stack_after) or "-"
        lines.append(
            f"step={step.index} activity={step.observation.activity} event={step.event} "
            f"labels={labels} stack={stack}"
        )
    if trace.infeasible_at is not None:
        lines.append(f"infeasible_at={trace.infeasible_at}")
    return lines
