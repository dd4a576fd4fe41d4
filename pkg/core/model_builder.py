"""
Stackwise Model Builder
Breadth-first exploration of an app with similarity-based state merging
"""

import time
from collections import deque
from dataclasses import asdict, dataclass
from typing import Any, Deque, Dict, List, Optional, Tuple

from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn, TimeElapsedColumn

from core.app_spec import AppSpec, Event, StatusMap
from core.exceptions import ReplayDivergenceError, StateExplosionError
from core.latte_model import LatteModel, ModelState, Transition, as_fraction
from core.sim_runtime import Observation, RuntimeState, ViewSnapshot, fire, observe, replay, start
from utils.logger import get_logger

logger = get_logger(__name__)

EVENT_ORDERS = ("position", "declaration")


@dataclass(frozen=True)
class BuildConfig:
    omega: float = 0.5
    similarity_threshold: float = 0.8
    max_events: Optional[int] = None
    max_wall_time: Optional[float] = 10800
    event_order: str = "position"
    track_status: bool = True
    track_stack: bool = True

    def __post_init__(self):
        if not 0 <= self.omega <= 1:
            raise ValueError(f"omega must be within [0, 1], got {self.omega}")
        if not 0 <= self.similarity_threshold <= 1:
            raise ValueError(f"similarity threshold must be within [0, 1], got {self.similarity_threshold}")
        if self.max_events is not None and self.max_events < 0:
            raise ValueError("max_events must not be negative")
        if self.max_wall_time is not None and self.max_wall_time < 0:
            raise ValueError("max_wall_time must not be negative")
        if self.event_order not in EVENT_ORDERS:
            raise ValueError(f"event_order must be one of {', '.join(EVENT_ORDERS)}")

    @classmethod
    def from_config(cls, config: Dict, **overrides) -> "BuildConfig":
        """
        Build from the 'builder' config section; non-None overrides win.

        Args:
            config: Loaded configuration
            **overrides: Field values from the command line

        Returns:
            BuildConfig
        """
        section = dict(config.get('builder', {}))
        section.update({key: value for key, value in overrides.items() if value is not None})
        known = {name: section[name] for name in cls.__dataclass_fields__ if name in section}
        return cls(**known)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class BuildReport:
    model: LatteModel
    events_fired: int
    states_merged: int
    states_revisited: int
    wall_time: float
    truncated: bool
    config: BuildConfig

    def to_dict(self, include_timings: bool = True) -> Dict[str, Any]:
        report = {
            "app": self.model.name,
            "config": self.config.to_dict(),
            "states": len(self.model.ordinary_states),
            "transitions": len(self.model.transitions),
            "labels_covered": sorted(self.model.covered_labels()),
            "label_coverage": float(self.model.label_coverage()),
            "events_fired": self.events_fired,
            "states_merged": self.states_merged,
            "states_revisited": self.states_revisited,
            "truncated": self.truncated,
        }
        if include_timings:
            report["wall_time"] = round(self.wall_time, 6)
        return report


class ModelBuilder:
    """Explores the simulated app and builds its labelled transition model."""

    def __init__(self, spec: AppSpec, cfg: Optional[BuildConfig] = None, show_progress: bool = False):
        """
        Initialize the builder.

        Args:
            spec: Validated app spec
            cfg: Build configuration
            show_progress: Render a live progress line on stderr
        """
        self.spec = spec
        self.cfg = cfg or BuildConfig()
        self.show_progress = show_progress
        self.threshold = as_fraction(self.cfg.similarity_threshold)

        # Statistics
        self.events_fired = 0
        self.states_merged = 0
        self.states_revisited = 0

    def abstract(self, observation: Observation) -> Tuple[str, Tuple[ViewSnapshot, ...], Tuple[str, ...]]:
        """(activity, views, stack) of an observation as the model sees it."""
        views = observation.views
        if not self.cfg.track_status:
            views = tuple(ViewSnapshot(v.id, v.view_type, v.position, StatusMap()) for v in views)
        stack = observation.stack_snapshot if self.cfg.track_stack else ()
        return observation.activity, views, stack

    def ordered_events(self, observation: Observation) -> List[Event]:
        events = list(observation.applicable_events)
        if self.cfg.event_order == "declaration":
            activity = self.spec.activity(observation.activity)
            declared = {view.id: index for index, view in enumerate(activity.views)}
            events.sort(key=lambda e: (e.is_global, declared.get(e.view, 0), e.sort_key()))
        return events

    def reposition(self, state: ModelState) -> RuntimeState:
        """Restart the app and replay a state's access sequence."""
        trace = replay(self.spec, state.access_seq)
        self.events_fired += len(trace.steps)
        if not trace.feasible or trace.final_observation is None:
            raise ReplayDivergenceError(f"Access sequence of s{state.id} is no longer executable")
        if self.abstract(trace.final_observation) != state.identity:
            raise ReplayDivergenceError(f"Access sequence of s{state.id} reaches a different screen")
        return trace.final_state

    def _out_of_budget(self, started: float) -> bool:
        if self.cfg.max_events is not None and self.events_fired >= self.cfg.max_events:
            return True
        if self.cfg.max_wall_time is not None and time.monotonic() - started >= self.cfg.max_wall_time:
            return True
        return False

    def build(self) -> BuildReport:
        """
        Run the exploration loop until every queued state is exhausted or the budget runs out.

        Returns:
            BuildReport with the model and exploration statistics
        """
        started = time.monotonic()
        self.events_fired = self.states_merged = self.states_revisited = 0

        model = LatteModel(self.spec.label_universe, name=self.spec.name)
        entry_observation = observe(start(self.spec))
        s0 = model.add_entry_state(*self.abstract(entry_observation))

        pending: Dict[int, Deque[Event]] = {s0.id: deque(self.ordered_events(entry_observation))}
        queue: Deque[int] = deque([s0.id])
        truncated = False

        progress = None
        if self.show_progress:
            progress = Progress(
                SpinnerColumn(),
                TextColumn("[progress.description]{task.description}"),
                TimeElapsedColumn(),
                console=Console(stderr=True),
                transient=True,
            )
            progress.start()
            task = progress.add_task(f"[cyan]Exploring {self.spec.name}...", total=None)

        try:
            while True:
                while queue and not pending[queue[0]]:
                    queue.popleft()
                if not queue:
                    break
                if self._out_of_budget(started):
                    truncated = True
                    break

                head = model.states[queue[0]]
                event = pending[head.id].popleft()
                runtime = self.reposition(head)
                result = fire(runtime, event)
                self.events_fired += 1

                if result.next.terminated:
                    model.add_transition(Transition(head.id, event, result.emitted, model.q))
                    continue

                observation = observe(result.next)
                activity, views, stack = self.abstract(observation)

                identical = model.find_identical(activity, views, stack)
                if identical is not None:
                    model.add_transition(Transition(head.id, event, result.emitted, identical))
                    self.states_revisited += 1
                    continue

                access_seq = head.access_seq + (event,)
                candidate = ModelState(-1, activity, views, stack, access_seq)
                best = model.find_most_similar(candidate, self.cfg.omega)
                if best is not None and best[1] > self.threshold:
                    model.merge_into(best[0], candidate, Transition(head.id, event, result.emitted, best[0]))
                    self.states_merged += 1
                    continue

                state = model.add_state(activity, views, stack, access_seq)
                model.add_transition(Transition(head.id, event, result.emitted, state.id))
                pending[state.id] = deque(self.ordered_events(observation))
                queue.append(state.id)
                logger.debug(f"New state s{state.id} on {activity} via {event}")

                if progress is not None:
                    progress.update(
                        task,
                        description=f"[cyan]Exploring {self.spec.name}: "
                                    f"{len(model.states)} states, {self.events_fired} events",
                    )
        finally:
            if progress is not None:
                progress.stop()

        wall_time = time.monotonic() - started
        if truncated:
            logger.warning(f"Model build truncated after {self.events_fired} events")
        logger.info(
            f"Model built: {len(model.ordinary_states)} states, "
            f"{len(model.transitions)} transitions, {self.events_fired} events"
        )

        return BuildReport(
            model=model,
            events_fired=self.events_fired,
            states_merged=self.states_merged,
            states_revisited=self.states_revisited,
            wall_time=wall_time,
            truncated=truncated,
            config=self.cfg,
        )


def build_model(spec: AppSpec, cfg: Optional[BuildConfig] = None, show_progress: bool = False) -> BuildReport:
    """Build the model of `spec` under `cfg`."""
    return ModelBuilder(spec, cfg, show_progress).build()


def brute_force_model(spec: AppSpec, depth_bound: int = 64, state_cap: int = 4096) -> LatteModel:
    """
    Exhaustive reference model without merging.

    The search runs over exact runtime states (hidden statuses and lower
    stack entries included), each expanded once. Every runtime state is then
    projected onto its screen (activity, visible views with statuses, stack),
    and the model keeps one state per screen, with the access sequence of
    the first runtime state that showed it.

    Args:
        spec: Small validated app spec
        depth_bound: Maximum access sequence length expanded
        state_cap: Maximum number of runtime states before giving up

    Returns:
        LatteModel

    Raises:
        StateExplosionError: more than state_cap runtime states were found
    """
    model = LatteModel(spec.label_universe, name=spec.name)
    initial = start(spec)
    first = observe(initial)
    s0 = model.add_entry_state(first.activity, first.views, first.stack_snapshot)

    screen_of: Dict[Tuple, int] = {initial.state_key(): s0.id}
    access: Dict[Tuple, Tuple[Event, ...]] = {initial.state_key(): ()}
    queue: Deque[RuntimeState] = deque([initial])

    while queue:
        current = queue.popleft()
        key = current.state_key()
        if len(access[key]) >= depth_bound:
            continue
        for event in observe(current).applicable_events:
            result = fire(current, event)
            if result.next.terminated:
                model.add_transition(Transition(screen_of[key], event, result.emitted, model.q))
                continue
            next_key = result.next.state_key()
            if next_key not in screen_of:
                if len(screen_of) >= state_cap:
                    raise StateExplosionError(state_cap)
                access[next_key] = access[key] + (event,)
                observation = observe(result.next)
                dest = model.find_identical(observation.activity, observation.views, observation.stack_snapshot)
                if dest is None:
                    dest = model.add_state(
                        observation.activity, observation.views, observation.stack_snapshot, access[next_key],
                    ).id
                screen_of[next_key] = dest
                queue.append(result.next)
            model.add_transition(Transition(screen_of[key], event, result.emitted, screen_of[next_key]))

    if len(screen_of) > len(model.ordinary_states):
        logger.warning(
            f"{spec.name}: {len(screen_of)} runtime states share {len(model.ordinary_states)} screens; "
            f"hidden statuses decide some transitions"
        )
    return model


def enumerate_runtime_states(spec: AppSpec, cap: int = 4096) -> int:
    """Number of distinct reachable runtime states, hidden statuses included."""
    initial = start(spec)
    seen = {initial.state_key()}
    queue: Deque[RuntimeState] = deque([initial])
    while queue:
        current = queue.popleft()
        for event in observe(current).applicable_events:
            following = fire(current, event).next
            if following.terminated:
                continue
            key = following.state_key()
            if key not in seen:
                if len(seen) >= cap:
                    raise StateExplosionError(cap)
                seen.add(key)
                queue.append(following)
    return len(seen)
