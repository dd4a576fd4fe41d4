"""
Threshold Sweep
Model size and label coverage across similarity thresholds
"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence

from core.app_spec import AppSpec
from core.model_builder import BuildConfig, BuildReport, build_model
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    states: int
    transitions: int
    labels_covered: int
    labels_total: int
    events_fired: int
    truncated: bool
    wall_time: float

    @classmethod
    def from_report(cls, threshold: float, report: BuildReport) -> "SweepRow":
        model = report.model
        return cls(
            threshold=threshold,
            states=len(model.ordinary_states),
            transitions=len(model.transitions),
            labels_covered=len(model.covered_labels() & model.label_universe),
            labels_total=len(model.label_universe),
            events_fired=report.events_fired,
            truncated=report.truncated,
            wall_time=report.wall_time,
        )

    @property
    def label_coverage(self) -> float:
        return self.labels_covered / self.labels_total if self.labels_total else 1.0

    def to_dict(self, include_timings: bool = False) -> Dict[str, Any]:
        row = {
            "threshold": self.threshold,
            "states": self.states,
            "transitions": self.transitions,
            "labels_covered": self.labels_covered,
            "labels_total": self.labels_total,
            "label_coverage": round(self.label_coverage, 6),
            "events_fired": self.events_fired,
            "truncated": self.truncated,
        }
        if include_timings:
            row["wall_time"] = round(self.wall_time, 6)
        return row


def st_sweep(spec: AppSpec, thresholds: Sequence[float], cfg: Optional[BuildConfig] = None,
             workers: int = 1) -> List[SweepRow]:
    """
    Build one model per similarity threshold.

    Args:
        spec: Validated app spec
        thresholds: Thresholds in [0, 1]; rows keep this order
        cfg: Base build configuration (its threshold is replaced)
        workers: Parallel builds

    Returns:
        One SweepRow per threshold
    """
    cfg = cfg or BuildConfig()
    rows: List[Optional[SweepRow]] = [None] * len(thresholds)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        future_to_index = {
            executor.submit(build_model, spec, replace(cfg, similarity_threshold=threshold)): index
            for index, threshold in enumerate(thresholds)
        }
        for future in as_completed(future_to_index):
            index = future_to_index[future]
            rows[index] = SweepRow.from_report(thresholds[index], future.result())
            if rows[index].truncated:
                logger.warning(f"Build at threshold {thresholds[index]} was truncated")

    return rows
