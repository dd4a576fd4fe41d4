"""
Targeted Sequence Generator
Derives replay-validated event sequences that cover labelled transitions
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple, Union

import networkx as nx

from core.app_spec import AppSpec, Event
from core.exceptions import ModelFormatError, UnknownLabelError
from core.latte_model import LatteModel, Transition
from core.sim_runtime import Trace, replay
from utils.logger import get_logger

logger = get_logger(__name__)

SUITE_FORMAT = "stackwise-suite"

ReachSummary = Dict[int, FrozenSet[str]]


@dataclass(frozen=True)
class Target:
    labels: FrozenSet[str]

    @classmethod
    def parse(cls, labels: Union[str, Iterable[str]], universe: Iterable[str]) -> "Target":
        """
        Build a target from a comma-separated string or an iterable of labels.

        Raises:
            ValueError: no label given
            UnknownLabelError: some label is not in the universe
        """
        if isinstance(labels, str):
            labels = [label.strip() for label in labels.split(",")]
        chosen = frozenset(label for label in labels if label)
        if not chosen:
            raise ValueError("A target needs at least one label")
        unknown = chosen - frozenset(universe)
        if unknown:
            raise UnknownLabelError(unknown)
        return cls(chosen)


@dataclass(frozen=True)
class SuiteEntry:
    """One accepted sequence and the labelled transitions its replay confirmed."""

    events: Tuple[Event, ...]
    activities: Tuple[str, ...]
    covers: Tuple[int, ...]
    labels: FrozenSet[str]
    generated_for: int

    def to_dict(self, model: LatteModel) -> Dict[str, Any]:
        return {
            "events": [
                {"activity": activity, "view": event.view, "event": event.kind, "payload": event.payload}
                for activity, event in zip(self.activities, self.events)
            ],
            "covers": [model.transitions[index].to_dict() for index in self.covers],
            "labels": sorted(self.labels),
        }


@dataclass
class TargetedSuite:
    target: Target
    model: LatteModel = field(repr=False)
    sequences: List[SuiteEntry] = field(default_factory=list)
    uncovered: List[int] = field(default_factory=list)
    rejected: int = 0

    @property
    def total_events(self) -> int:
        return sum(len(entry.events) for entry in self.sequences)

    @property
    def covered_labels(self) -> FrozenSet[str]:
        labels = set()
        for entry in self.sequences:
            labels.update(entry.labels)
        return frozenset(labels & self.target.labels)

    @property
    def missing_labels(self) -> FrozenSet[str]:
        """Target labels emitted by no accepted sequence."""
        return self.target.labels - self.covered_labels

    @property
    def complete(self) -> bool:
        return not self.uncovered and not self.missing_labels

    def to_dict(self) -> Dict[str, Any]:
        return {
            "format": SUITE_FORMAT,
            "app": self.model.name,
            "target": sorted(self.target.labels),
            "sequences": [entry.to_dict(self.model) for entry in self.sequences],
            "uncovered": [self.model.transitions[index].to_dict() for index in self.uncovered],
            "missing_labels": sorted(self.missing_labels),
            "rejected": self.rejected,
            "total_events": self.total_events,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def load_suite(path: Union[str, Path]) -> List[Tuple[Event, ...]]:
    """Event sequences of a suite JSON file, ready for replay."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if data.get("format") != SUITE_FORMAT:
            raise ModelFormatError("Not a stackwise suite document")
        return [
            tuple(Event(item["view"], item["event"], item.get("payload")) for item in sequence["events"])
            for sequence in data["sequences"]
        ]
    except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as e:
        raise ModelFormatError(f"Malformed suite document: {e}") from e


def transition_graph(model: LatteModel) -> nx.MultiDiGraph:
    graph = nx.MultiDiGraph()
    graph.add_nodes_from(model.states)
    for index, transition in enumerate(model.transitions):
        graph.add_edge(transition.src, transition.dest, key=index)
    return graph


def labelled_transitions(model: LatteModel, target: Target) -> List[int]:
    """Indices of the transitions carrying at least one target label."""
    return [index for index, t in enumerate(model.transitions) if t.labels & target.labels]


def reach_summary(model: LatteModel, target: Target, graph: Optional[nx.MultiDiGraph] = None) -> ReachSummary:
    """
    Target labels each state can reach, directly or indirectly.

    Args:
        model: Built model
        target: Target labels
        graph: Precomputed transition graph

    Returns:
        state id -> reachable target labels
    """
    graph = graph if graph is not None else transition_graph(model)
    summary: Dict[int, Set[str]] = {state_id: set() for state_id in model.states}
    for index in labelled_transitions(model, target):
        transition = model.transitions[index]
        hits = transition.labels & target.labels
        for state_id in nx.ancestors(graph, transition.src) | {transition.src}:
            summary[state_id].update(hits)
    return {state_id: frozenset(labels) for state_id, labels in summary.items()}


def _candidate_paths(
    model: LatteModel,
    goal: int,
    allowed: Set[int],
    distance: Dict[int, int],
    summary: ReachSummary,
    target: Target,
    uncovered: FrozenSet[str],
    max_events: int,
) -> Iterator[Tuple[Event, ...]]:
    """Simple paths s0 -> goal in heuristic order, as event tuples."""
    outgoing: Dict[int, List[Tuple[int, Transition]]] = {}
    for index, transition in enumerate(model.transitions):
        outgoing.setdefault(transition.src, []).append((index, transition))

    def priority(item: Tuple[int, Transition]) -> Tuple:
        index, transition = item
        reachable = ((transition.labels & target.labels) | summary[transition.dest]) & uncovered
        return (-len(reachable), -len(transition.labels), distance.get(transition.dest, len(model.states)), index)

    def walk(node: int, visited: Set[int], events: List[Event]) -> Iterator[Tuple[Event, ...]]:
        if node == goal:
            yield tuple(events)
            return
        if len(events) + 1 >= max_events:
            return
        for index, transition in sorted(outgoing.get(node, []), key=priority):
            if transition.dest == node or transition.dest in visited or transition.dest not in allowed:
                continue
            visited.add(transition.dest)
            events.append(transition.event)
            yield from walk(transition.dest, visited, events)
            events.pop()
            visited.discard(transition.dest)

    yield from walk(model.s0, {model.s0}, [])


def find_covering_sequence(
    model: LatteModel,
    transition_index: int,
    exclude: Set[Tuple[Event, ...]],
    summary: ReachSummary,
    target: Target,
    uncovered: Optional[FrozenSet[str]] = None,
    max_length: Optional[int] = None,
    graph: Optional[nx.MultiDiGraph] = None,
) -> Optional[Tuple[Event, ...]]:
    """
    Event sequence from s0 that ends by firing the given transition.

    Args:
        model: Built model
        transition_index: Index of the transition to cover
        exclude: Sequences already tried or accepted
        summary: Reach summary for the target
        target: Target labels
        uncovered: Target labels still to cover (default: all)
        max_length: Longest sequence considered (default 4 x state count)
        graph: Precomputed transition graph

    Returns:
        Event tuple, or None when every candidate within the bound is excluded
    """
    graph = graph if graph is not None else transition_graph(model)
    transition = model.transitions[transition_index]
    goal = transition.src
    uncovered = target.labels if uncovered is None else uncovered
    max_length = max_length if max_length is not None else 4 * len(model.states)

    allowed = nx.ancestors(graph, goal) | {goal}
    if model.s0 not in allowed:
        return None
    distance = nx.shortest_path_length(graph.reverse(copy=False), source=goal)

    for path in _candidate_paths(model, goal, allowed, distance, summary, target, uncovered, max_length):
        candidate = path + (transition.event,)
        if candidate not in exclude:
            return candidate
    return None


def _model_walk(model: LatteModel, events: Tuple[Event, ...]) -> List[Optional[int]]:
    """Transition index taken at each step when following `events` through the model."""
    by_source: Dict[Tuple[int, Event], int] = {}
    for index, transition in enumerate(model.transitions):
        by_source.setdefault((transition.src, transition.event), index)

    walk: List[Optional[int]] = []
    state = model.s0
    for event in events:
        index = by_source.get((state, event)) if state is not None else None
        walk.append(index)
        state = model.transitions[index].dest if index is not None else None
    return walk


def _confirmed_cover(model: LatteModel, trace: Trace, events: Tuple[Event, ...], lt: Set[int]) -> Tuple[int, ...]:
    covers = []
    for step, index in zip(trace.steps, _model_walk(model, events)):
        if index in lt and step.emitted >= model.transitions[index].labels and index not in covers:
            covers.append(index)
    return tuple(covers)


class TargetedGenerator:
    """Generates the targeted sequence set for one model and target."""

    def __init__(self, model: LatteModel, spec: AppSpec, target: Target, maxtry: int = 5,
                 path_length_factor: int = 4):
        if maxtry < 1:
            raise ValueError("maxtry must be at least 1")
        self.model = model
        self.spec = spec
        self.target = target
        self.maxtry = maxtry
        self.max_length = path_length_factor * len(model.states)
        self.graph = transition_graph(model)

    def ordered_targets(self) -> List[int]:
        """Labelled transitions, deepest source first, then by index."""
        depth = nx.shortest_path_length(self.graph, source=self.model.s0)
        lt = labelled_transitions(self.model, self.target)
        return sorted(lt, key=lambda index: (-depth.get(self.model.transitions[index].src, -1), index))

    def generate(self) -> TargetedSuite:
        suite = TargetedSuite(target=self.target, model=self.model)
        summary = reach_summary(self.model, self.target, self.graph)
        lt = set(labelled_transitions(self.model, self.target))
        tried: Set[Tuple[Event, ...]] = set()

        for index in self.ordered_targets():
            if any(index in entry.covers for entry in suite.sequences):
                continue

            accepted = False
            for attempt in range(self.maxtry):
                candidate = find_covering_sequence(
                    self.model, index, tried, summary, self.target,
                    uncovered=self.target.labels - suite.covered_labels,
                    max_length=self.max_length,
                    graph=self.graph,
                )
                if candidate is None:
                    break
                tried.add(candidate)

                trace = replay(self.spec, candidate)
                transition = self.model.transitions[index]
                if trace.feasible and trace.steps[-1].emitted >= transition.labels:
                    covers = _confirmed_cover(self.model, trace, candidate, lt)
                    if index not in covers:
                        covers = covers + (index,)
                    suite.sequences.append(SuiteEntry(
                        events=candidate,
                        activities=tuple(step.observation.activity for step in trace.steps),
                        covers=covers,
                        labels=trace.emitted,
                        generated_for=index,
                    ))
                    accepted = True
                    break

                suite.rejected += 1
                reason = "labels not emitted" if trace.feasible else f"infeasible at event {trace.infeasible_at}"
                logger.warning(f"Candidate for transition {index} rejected on attempt {attempt + 1}: {reason}")

            if not accepted:
                suite.uncovered.append(index)

        logger.info(
            f"Generated {len(suite.sequences)} sequence(s), {suite.total_events} events, "
            f"{len(suite.uncovered)} uncovered transition(s)"
        )
        return suite


def generate(model: LatteModel, spec: AppSpec, target: Target, maxtry: int = 5,
             path_length_factor: int = 4) -> TargetedSuite:
    """
    Generate replay-validated sequences covering every labelled transition of the target.

    Args:
        model: Model built from spec
        spec: App spec used for replay validation
        target: Target labels
        maxtry: Candidate sequences tried per labelled transition
        path_length_factor: Sequence length bound as a multiple of the state count

    Returns:
        TargetedSuite
    """
    return TargetedGenerator(model, spec, target, maxtry, path_length_factor).generate()
