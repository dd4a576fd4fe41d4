"""
Benchmark Module
"""

from modules.bench.random_explorer import CoverageReport, RandomConfig, RandomResult, explore_seeds, random_explore
from modules.bench.threshold_sweep import SweepRow, st_sweep
from modules.bench.comparison import ComparisonReport, compare

__all__ = [
    'CoverageReport',
    'RandomConfig',
    'RandomResult',
    'explore_seeds',
    'random_explore',
    'SweepRow',
    'st_sweep',
    'ComparisonReport',
    'compare',
]
