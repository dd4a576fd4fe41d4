"""
Targeted vs Random Comparison
Events needed by targeted generation against seeded random exploration
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from tabulate import tabulate

from core.app_spec import AppSpec
from core.model_builder import BuildConfig, build_model
from core.target_gen import Target, TargetedSuite, generate
from modules.bench.random_explorer import RandomConfig, RandomResult, explore_seeds
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class ComparisonReport:
    app: str
    target: Target
    build_events: int
    build_truncated: bool
    suite: TargetedSuite = field(repr=False)
    random: List[RandomResult] = field(default_factory=list)
    build_time: float = 0.0

    @property
    def suite_length(self) -> int:
        return self.suite.total_events

    def ratio(self, result: RandomResult) -> Optional[float]:
        if not result.covered or self.suite_length == 0:
            return None
        return result.events_to_cover / self.suite_length

    def to_dict(self, include_timings: bool = False) -> Dict[str, Any]:
        report = {
            "app": self.app,
            "target": sorted(self.target.labels),
            "targeted": {
                "build_events": self.build_events,
                "build_truncated": self.build_truncated,
                "suite_length": self.suite_length,
                "sequences": len(self.suite.sequences),
                "complete": self.suite.complete,
                "rejected": self.suite.rejected,
            },
            "random": [
                dict(result.to_dict(), ratio=None if self.ratio(result) is None else round(self.ratio(result), 3))
                for result in self.random
            ],
        }
        if include_timings:
            report["targeted"]["build_time"] = round(self.build_time, 6)
        return report

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(include_timings), indent=2)

    def to_text(self) -> str:
        targeted = f"{self.build_events}/{self.suite_length}"
        rows = []
        for result in self.random:
            ratio = self.ratio(result)
            rows.append([
                result.seed,
                result.events_to_cover if result.covered else "not covered",
                targeted,
                "-" if ratio is None else f"{ratio:.1f}x",
            ])
        title = f"{self.app}: target {{{', '.join(sorted(self.target.labels))}}}"
        table = tabulate(rows, headers=["Seed", "Random", "Targeted (build/length)", "Ratio"], tablefmt="simple")
        return f"{title}\n{table}\n"


def compare(spec: AppSpec, target: Target, build_cfg: Optional[BuildConfig] = None,
            random_cfg: Optional[RandomConfig] = None, seeds: Sequence[int] = (1, 2, 3, 4, 5),
            maxtry: int = 5, path_length_factor: int = 4, workers: int = 1) -> ComparisonReport:
    """
    Run the targeted pipeline once and the random baseline once per seed.

    Args:
        spec: Validated app spec
        target: Target labels
        build_cfg: Model build configuration
        random_cfg: Batch size and cap for the random runs (its seed is ignored)
        seeds: Random seeds
        maxtry: Candidates per labelled transition
        path_length_factor: Sequence length cap, in multiples of the model size
        workers: Parallel random runs

    Returns:
        ComparisonReport
    """
    build = build_model(spec, build_cfg or BuildConfig())
    suite = generate(build.model, spec, target, maxtry=maxtry, path_length_factor=path_length_factor)
    random_results = explore_seeds(spec, target, random_cfg or RandomConfig(), seeds, workers)

    logger.info(
        f"Targeted {build.events_fired}/{suite.total_events} vs random "
        f"{', '.join(str(r.events_to_cover) for r in random_results)}"
    )
    return ComparisonReport(
        app=spec.name,
        target=target,
        build_events=build.events_fired,
        build_truncated=build.truncated,
        suite=suite,
        random=random_results,
        build_time=build.wall_time,
    )
