"""
Random Explorer
Seeded random-event baseline with batch-granular coverage checks
"""

import random
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional, Sequence

from core.app_spec import AppSpec
from core.sim_runtime import fire, observe, start
from core.target_gen import Target
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class RandomConfig:
    seed: int = 1
    batch: int = 1000
    max_batches: int = 50

    def __post_init__(self):
        if self.batch < 1:
            raise ValueError("batch must be at least 1")
        if self.max_batches < 0:
            raise ValueError("max_batches must not be negative")

    @classmethod
    def from_config(cls, config: Dict, **overrides) -> "RandomConfig":
        section = dict(config.get('random', {}))
        section.update({key: value for key, value in overrides.items() if value is not None})
        return cls(
            seed=section.get('seed', 1),
            batch=section.get('batch', 1000),
            max_batches=section.get('max_batches', 50),
        )


@dataclass
class CoverageReport:
    labels_covered: FrozenSet[str]
    labels_total: int
    target_labels: FrozenSet[str]
    events_fired: int
    screens_visited: int
    transitions_visited: int
    restarts: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "labels_covered": sorted(self.labels_covered),
            "labels_total": self.labels_total,
            "target_covered": sorted(self.labels_covered & self.target_labels),
            "events_fired": self.events_fired,
            "screens_visited": self.screens_visited,
            "transitions_visited": self.transitions_visited,
            "restarts": self.restarts,
        }


@dataclass
class RandomResult:
    seed: int
    events_to_cover: Optional[int]
    coverage: CoverageReport = field(repr=False)

    @property
    def covered(self) -> bool:
        return self.events_to_cover is not None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "events_to_cover": self.events_to_cover,
            "covered": self.covered,
            "coverage": self.coverage.to_dict(),
        }


def random_explore(spec: AppSpec, target: Target, cfg: Optional[RandomConfig] = None) -> RandomResult:
    """
    Fire uniformly chosen applicable events until the target is covered.

    Coverage is checked at batch boundaries, so events_to_cover is always a
    multiple of the batch size. The app restarts whenever it terminates or
    reaches a screen without events; restarts are not counted as events.

    Args:
        spec: Validated app spec
        target: Labels that must all be emitted
        cfg: Seed, batch size and batch cap

    Returns:
        RandomResult; events_to_cover is None when max_batches ran out
    """
    cfg = cfg or RandomConfig()
    rng = random.Random(cfg.seed)

    state = start(spec)
    emitted = set()
    screens = set()
    transitions = set()
    fired = restarts = 0
    events_to_cover = None
    fresh = True
    stuck = False

    for _ in range(cfg.max_batches):
        fired_in_batch = 0
        while fired_in_batch < cfg.batch:
            observation = observe(state)
            screen = (observation.activity, observation.views, observation.stack_snapshot)
            screens.add(screen)
            if not observation.applicable_events:
                if fresh:
                    stuck = True
                    break
                state = start(spec)
                restarts += 1
                fresh = True
                continue

            event = rng.choice(observation.applicable_events)
            result = fire(state, event)
            fired += 1
            fired_in_batch += 1
            emitted.update(result.emitted)
            transitions.add((screen, event))

            fresh = False
            state = result.next
            if state.terminated:
                state = start(spec)
                restarts += 1
                fresh = True

        if stuck:
            logger.warning(f"Seed {cfg.seed}: the entry screen offers no events")
            break
        if target.labels <= emitted:
            events_to_cover = fired
            logger.info(f"Seed {cfg.seed}: target covered within {events_to_cover} events")
            break
    else:
        logger.info(f"Seed {cfg.seed}: target not covered after {cfg.max_batches} batch(es)")

    coverage = CoverageReport(
        labels_covered=frozenset(emitted),
        labels_total=len(spec.label_universe),
        target_labels=target.labels,
        events_fired=fired,
        screens_visited=len(screens),
        transitions_visited=len(transitions),
        restarts=restarts,
    )
    return RandomResult(seed=cfg.seed, events_to_cover=events_to_cover, coverage=coverage)


def explore_seeds(spec: AppSpec, target: Target, cfg: RandomConfig, seeds: Sequence[int],
                  workers: int = 1) -> List[RandomResult]:
    """Run random_explore once per seed; results follow the order of `seeds`."""
    configs = [RandomConfig(seed=seed, batch=cfg.batch, max_batches=cfg.max_batches) for seed in seeds]
    results: List[Optional[RandomResult]] = [None] * len(configs)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        future_to_index = {
            executor.submit(random_explore, spec, target, seed_cfg): index
            for index, seed_cfg in enumerate(configs)
        }
        for future in as_completed(future_to_index):
            results[future_to_index[future]] = future.result()

    return results
