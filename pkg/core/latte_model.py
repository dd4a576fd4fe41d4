"""
Labelled Activity Transition Model
States, labelled transitions, state similarity, merging and export
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from jinja2 import Template

from core.app_spec import Event
from core.exceptions import ModelFormatError
from core.sim_runtime import ViewSnapshot
from utils.logger import get_logger

logger = get_logger(__name__)

ENTRY = "entry"
ORDINARY = "ordinary"
TERMINAL = "terminal"

MODEL_FORMAT = "stackwise-model"
MODEL_VERSION = 1

DOT_TEMPLATE = """digraph "{{ name }}" {
  rankdir=LR;
  node [shape=box, fontname="Helvetica"];
  edge [fontname="Helvetica", fontsize=10];

{% for node in nodes %}  {{ node.name }} [label="{{ node.label }}"{{ node.style }}];
{% endfor %}
{% for edge in edges %}  {{ edge.src }} -> {{ edge.dest }} [label="{{ edge.label }}"{{ edge.style }}];
{% endfor %}}
"""


def _dot_escape(text: str) -> str:
    """Quote-safe text for a double-quoted DOT string."""
    return text.replace("\\", "\\\\").replace('"', '\\"')


@dataclass(frozen=True)
class ModelState:
    id: int
    activity: str
    views: Tuple[ViewSnapshot, ...]
    stack: Tuple[str, ...]
    access_seq: Tuple[Event, ...] = ()
    kind: str = ORDINARY

    @property
    def identity(self) -> Tuple:
        return (self.activity, self.views, self.stack)

    @property
    def is_terminal(self) -> bool:
        return self.kind == TERMINAL

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind,
            "activity": self.activity,
            "views": [view.to_dict() for view in self.views],
            "stack": list(self.stack),
            "access_seq": [event.to_dict() for event in self.access_seq],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelState":
        return cls(
            id=data["id"],
            activity=data["activity"],
            views=tuple(ViewSnapshot.from_dict(view) for view in data["views"]),
            stack=tuple(data["stack"]),
            access_seq=tuple(Event.from_dict(event) for event in data["access_seq"]),
            kind=data["kind"],
        )


@dataclass(frozen=True)
class Transition:
    src: int
    event: Event
    labels: FrozenSet[str]
    dest: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "src": self.src,
            "event": self.event.to_dict(),
            "labels": sorted(self.labels),
            "dest": self.dest,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Transition":
        return cls(data["src"], Event.from_dict(data["event"]), frozenset(data["labels"]), data["dest"])


def as_fraction(value: Union[int, float, Fraction]) -> Fraction:
    """Exact rational for a weight or threshold given as a decimal."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


def view_similarity(s1: ModelState, s2: ModelState) -> Fraction:
    """Jaccard index of the two view sets; 1 when both are empty."""
    views1, views2 = set(s1.views), set(s2.views)
    union = views1 | views2
    if not union:
        return Fraction(1)
    return Fraction(len(views1 & views2), len(union))


def stack_similarity(s1: ModelState, s2: ModelState) -> int:
    return 1 if tuple(s1.stack) == tuple(s2.stack) else 0


def state_similarity(s1: ModelState, s2: ModelState, omega: Union[float, Fraction]) -> Fraction:
    """
    Weighted similarity of two states.

    Args:
        s1: First state
        s2: Second state
        omega: Weight of the view similarity, in [0, 1]

    Returns:
        omega * view similarity + (1 - omega) * stack similarity, or 0 when
        the states belong to different activities
    """
    if s1.activity != s2.activity:
        return Fraction(0)
    weight = as_fraction(omega)
    return weight * view_similarity(s1, s2) + (1 - weight) * stack_similarity(s1, s2)


class LatteModel:
    """
    Labelled transition model of an app.

    States are keyed by integer id; the entry state is 0 and the terminal
    state is 1. Transitions form a set kept in insertion order.
    """

    def __init__(self, label_universe: Iterable[str] = (), name: str = "model"):
        self.name = name
        self.label_universe = frozenset(label_universe)
        self.states: Dict[int, ModelState] = {}
        self.transitions: List[Transition] = []
        self.s0: Optional[int] = None
        self.q: Optional[int] = None
        self._transition_set = set()
        self._by_identity: Dict[Tuple, int] = {}
        self._next_id = 0

    def _allocate(self) -> int:
        state_id = self._next_id
        self._next_id += 1
        return state_id

    def _insert(self, state: ModelState) -> ModelState:
        self.states[state.id] = state
        self._next_id = max(self._next_id, state.id + 1)
        if state.kind == ENTRY:
            self.s0 = state.id
        elif state.kind == TERMINAL:
            self.q = state.id
        if not state.is_terminal:
            self._by_identity.setdefault(state.identity, state.id)
        return state

    def add_entry_state(self, activity: str, views: Tuple[ViewSnapshot, ...], stack: Tuple[str, ...]) -> ModelState:
        """Create s0 and the terminal state q."""
        entry = self._insert(ModelState(self._allocate(), activity, tuple(views), tuple(stack), (), ENTRY))
        self._insert(ModelState(self._allocate(), "", (), (), (), TERMINAL))
        return entry

    def add_state(self, activity: str, views: Tuple[ViewSnapshot, ...], stack: Tuple[str, ...],
                  access_seq: Tuple[Event, ...]) -> ModelState:
        return self._insert(ModelState(self._allocate(), activity, tuple(views), tuple(stack), tuple(access_seq)))

    def find_identical(self, activity: str, views: Tuple[ViewSnapshot, ...], stack: Tuple[str, ...]) -> Optional[int]:
        return self._by_identity.get((activity, tuple(views), tuple(stack)))

    def find_most_similar(self, candidate: ModelState, omega: Union[float, Fraction]) -> Optional[Tuple[int, Fraction]]:
        """
        Most similar non-terminal state of the candidate's activity.

        Args:
            candidate: State not (yet) in the model
            omega: View weight

        Returns:
            (state id, similarity) with ties going to the lowest id, or None
            when no state of that activity exists
        """
        best: Optional[Tuple[int, Fraction]] = None
        for state_id in sorted(self.states):
            state = self.states[state_id]
            if state.is_terminal or state.activity != candidate.activity:
                continue
            similarity = state_similarity(state, candidate, omega)
            if best is None or similarity > best[1]:
                best = (state_id, similarity)
        return best

    def add_transition(self, transition: Transition) -> bool:
        """Add a transition; returns False when an identical one exists."""
        if transition.src not in self.states or transition.dest not in self.states:
            raise ValueError(f"Transition endpoint missing: {transition.src} -> {transition.dest}")
        if transition in self._transition_set:
            return False
        self._transition_set.add(transition)
        self.transitions.append(transition)
        return True

    def merge_into(self, existing: int, newcomer: ModelState, incoming: Transition) -> Transition:
        """
        Discard `newcomer` in favour of `existing` and redirect the incoming transition.

        The existing state's fields are left untouched.
        """
        redirected = Transition(incoming.src, incoming.event, incoming.labels, existing)
        self.add_transition(redirected)
        logger.debug(f"Merged candidate for {newcomer.activity} into s{existing}")
        return redirected

    @property
    def ordinary_states(self) -> List[ModelState]:
        """Non-terminal states, entry included, by id."""
        return [self.states[state_id] for state_id in sorted(self.states) if not self.states[state_id].is_terminal]

    def labelled_transitions(self) -> List[Transition]:
        return [transition for transition in self.transitions if transition.labels]

    def covered_labels(self) -> FrozenSet[str]:
        labels = set()
        for transition in self.transitions:
            labels.update(transition.labels)
        return frozenset(labels)

    def label_coverage(self) -> Fraction:
        """Share of the label universe carried by some transition."""
        if not self.label_universe:
            return Fraction(1)
        return Fraction(len(self.covered_labels() & self.label_universe), len(self.label_universe))

    def outgoing(self, state_id: int) -> List[Tuple[int, Transition]]:
        """(transition index, transition) pairs leaving a state."""
        return [(index, t) for index, t in enumerate(self.transitions) if t.src == state_id]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "name": self.name,
            "label_universe": sorted(self.label_universe),
            "s0": self.s0,
            "q": self.q,
            "states": [self.states[state_id].to_dict() for state_id in sorted(self.states)],
            "transitions": [transition.to_dict() for transition in self.transitions],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LatteModel":
        if not isinstance(data, dict) or data.get("format") != MODEL_FORMAT:
            raise ModelFormatError("Not a stackwise model document")
        if data.get("version") != MODEL_VERSION:
            raise ModelFormatError(f"Unsupported model version {data.get('version')}")
        try:
            model = cls(data["label_universe"], data.get("name", "model"))
            for state in data["states"]:
                model._insert(ModelState.from_dict(state))
            for transition in data["transitions"]:
                model.add_transition(Transition.from_dict(transition))
        except (KeyError, TypeError, ValueError) as e:
            raise ModelFormatError(f"Malformed model document: {e}") from e
        if model.s0 != data["s0"] or model.q != data["q"]:
            raise ModelFormatError("Entry or terminal state does not match its declared id")
        return model

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_dot(self) -> str:
        nodes = []
        for state_id in sorted(self.states):
            state = self.states[state_id]
            if state.is_terminal:
                nodes.append({"name": f"s{state_id}", "label": "q", "style": ", shape=doublecircle"})
                continue
            stack = "/".join(state.stack) or "-"
            style = ", peripheries=2" if state.kind == ENTRY else ""
            nodes.append({"name": f"s{state_id}", "label": _dot_escape(f"s{state_id} | {stack}"), "style": style})

        edges = []
        for transition in self.transitions:
            label = str(transition.event)
            style = ""
            if transition.labels:
                label += " {" + ",".join(sorted(transition.labels)) + "}"
                style = ", color=red, style=bold"
            edges.append({
                "src": f"s{transition.src}",
                "dest": f"s{transition.dest}",
                "label": _dot_escape(label),
                "style": style,
            })

        template = Template(DOT_TEMPLATE, keep_trailing_newline=True)
        return template.render(name=_dot_escape(self.name), nodes=nodes, edges=edges)

    def export(self, fmt: str) -> str:
        """
        Render the model.

        Args:
            fmt: 'json' or 'dot' (case-insensitive)

        Returns:
            Document text
        """
        fmt = fmt.lower()
        if fmt == "json":
            return self.to_json()
        if fmt == "dot":
            return self.to_dot()
        raise ValueError(f"Unsupported export format: {fmt}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatteModel):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return f"LatteModel({self.name!r}, states={len(self.states)}, transitions={len(self.transitions)})"


def load_model(path: Union[str, Path]) -> LatteModel:
    """Read a model JSON file."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"Model file is not valid JSON: {e}") from e
    return LatteModel.from_dict(data)
