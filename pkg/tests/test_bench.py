import textwrap

import pytest

from core.app_spec import parse_app_spec
from core.model_builder import BuildConfig
from core.target_gen import Target
from modules.bench import RandomConfig, compare, explore_seeds, random_explore, st_sweep

THRESHOLDS = [0, 0.25, 0.5, 0.8, 1.0]

DEAD_END = """
name: dead_end
entry_activity: Main
global_events: []
activities:
  - id: Main
    views:
      - {id: btn, view_type: Button, position: [0, 0], initial_status: {}}
    handlers:
      - on: {view: btn, event: Click}
        effects:
          - {StartActivity: Dead}
        emits: [tapped]
  - id: Dead
    views:
      - {id: sign, view_type: TextView, position: [0, 0], initial_status: {enabled: false}}
"""

STUCK = """
name: stuck
entry_activity: Main
global_events: []
activities:
  - id: Main
    views:
      - {id: sign, view_type: TextView, position: [0, 0], initial_status: {enabled: false}}
"""


def _target(spec, labels):
    return Target.parse(labels, spec.label_universe)


def test_random_covers_at_batch_boundary(one_button):
    result = random_explore(one_button, _target(one_button, "tapped"), RandomConfig(seed=3))
    assert result.covered
    assert result.events_to_cover == 1000
    assert result.coverage.events_fired == 1000
    assert result.coverage.labels_covered == {"tapped"}


def test_random_small_batches_are_multiples(one_button):
    result = random_explore(one_button, _target(one_button, "tapped"), RandomConfig(seed=5, batch=7))
    assert result.covered
    assert result.events_to_cover % 7 == 0


def test_random_restarts_after_termination(one_button):
    result = random_explore(one_button, _target(one_button, "tapped"), RandomConfig(seed=1, batch=200))
    # Back on the only screen ends the app, so a long run restarts
    assert result.coverage.restarts > 0


def test_dead_end_restarts_do_not_use_up_the_batch():
    spec = parse_app_spec(textwrap.dedent(DEAD_END))
    target = _target(spec, "tapped")
    result = random_explore(spec, target, RandomConfig(seed=1))
    assert result.covered
    assert result.events_to_cover == result.coverage.events_fired == 1000
    # every Click lands on the dead end, so each one is followed by a restart
    assert result.coverage.restarts > 0


def test_entry_screen_without_events_gives_up():
    spec = parse_app_spec(textwrap.dedent(STUCK))
    result = random_explore(spec, Target(frozenset({"tapped"})), RandomConfig(seed=1, batch=10, max_batches=3))
    assert not result.covered
    assert result.coverage.events_fired == 0
    assert result.coverage.restarts == 0


def test_random_zero_batches_never_covers(one_button):
    result = random_explore(one_button, _target(one_button, "tapped"), RandomConfig(max_batches=0))
    assert not result.covered
    assert result.events_to_cover is None
    assert result.coverage.events_fired == 0


def test_random_gives_up_on_unreachable_label(unreachable_label):
    cfg = RandomConfig(seed=2, batch=50, max_batches=3)
    result = random_explore(unreachable_label, _target(unreachable_label, "neverFired"), cfg)
    assert not result.covered
    assert result.coverage.events_fired == 150
    assert "neverFired" not in result.coverage.labels_covered


def test_random_is_reproducible(tomdroid):
    target = _target(tomdroid, "deleteNote,undeleteNote")
    cfg = RandomConfig(seed=4, batch=100, max_batches=5)
    assert random_explore(tomdroid, target, cfg).to_dict() == random_explore(tomdroid, target, cfg).to_dict()


def test_explore_seeds_keeps_seed_order(one_button):
    target = _target(one_button, "tapped")
    results = explore_seeds(one_button, target, RandomConfig(batch=10), [9, 2, 5], workers=3)
    assert [result.seed for result in results] == [9, 2, 5]
    serial = explore_seeds(one_button, target, RandomConfig(batch=10), [9, 2, 5], workers=1)
    assert [r.to_dict() for r in results] == [r.to_dict() for r in serial]


@pytest.mark.parametrize("fields", [{"batch": 0}, {"max_batches": -1}])
def test_random_config_validation(fields):
    with pytest.raises(ValueError):
        RandomConfig(**fields)


def test_random_config_from_config():
    cfg = RandomConfig.from_config({"random": {"batch": 20, "max_batches": 4}}, seed=8)
    assert cfg == RandomConfig(seed=8, batch=20, max_batches=4)


def test_sweep_rows_follow_thresholds(tomdroid):
    rows = st_sweep(tomdroid, THRESHOLDS, workers=2)
    assert [row.threshold for row in rows] == THRESHOLDS
    states = [row.states for row in rows]
    assert states == sorted(states)
    by_threshold = {row.threshold: row for row in rows}
    assert by_threshold[0.8].labels_covered == by_threshold[1.0].labels_covered == 2
    assert by_threshold[0.8].label_coverage == 1.0


def test_sweep_two_checkbox_extremes(two_checkbox):
    low, high = st_sweep(two_checkbox, [0, 1])
    assert low.states <= high.states
    assert high.states == 4


def test_sweep_row_to_dict_excludes_timings(one_button):
    [row] = st_sweep(one_button, [0.8])
    assert "wall_time" not in row.to_dict()
    assert "wall_time" in row.to_dict(include_timings=True)


def test_sweep_keeps_base_config(tippytipper):
    rows = st_sweep(tippytipper, [1.0], BuildConfig(track_stack=False, track_status=False))
    [full] = st_sweep(tippytipper, [1.0])
    assert rows[0].states < full.states


def test_compare_report(tomdroid):
    target = _target(tomdroid, "deleteNote,undeleteNote")
    report = compare(tomdroid, target, random_cfg=RandomConfig(batch=500, max_batches=20), seeds=(1, 2))
    assert report.suite.complete
    assert report.suite_length <= 12
    assert [result.seed for result in report.random] == [1, 2]
    for result in report.random:
        if result.covered:
            assert report.ratio(result) == result.events_to_cover / report.suite_length
        else:
            assert report.ratio(result) is None

    data = report.to_dict()
    assert data["targeted"]["suite_length"] == report.suite_length
    assert "build_time" not in data["targeted"]
    assert "build_time" in report.to_dict(include_timings=True)["targeted"]

    text = report.to_text()
    assert text.startswith("tomdroid: target {deleteNote, undeleteNote}")
    assert "Targeted (build/length)" in text


def test_compare_is_idempotent(hotdeath):
    target = _target(hotdeath, "playWildDrawFour")
    cfg = RandomConfig(batch=100, max_batches=5)
    first = compare(hotdeath, target, random_cfg=cfg, seeds=(1, 2, 3))
    second = compare(hotdeath, target, random_cfg=cfg, seeds=(1, 2, 3), workers=3)
    assert first.to_json() == second.to_json()


def test_targeted_suite_beats_random_tenfold(tomdroid):
    target = _target(tomdroid, "deleteNote,undeleteNote")
    report = compare(tomdroid, target, seeds=(1, 2, 3, 4, 5))
    assert report.suite.complete
    assert report.suite_length <= 15
    for result in report.random:
        assert result.covered, f"seed {result.seed} did not cover the target"
        assert report.ratio(result) >= 10


def test_compare_honours_path_length_factor(hotdeath):
    target = _target(hotdeath, "playWildDrawFour")
    cfg = RandomConfig(batch=100, max_batches=1)
    assert compare(hotdeath, target, random_cfg=cfg, seeds=(1,)).suite.complete
    report = compare(hotdeath, target, random_cfg=cfg, seeds=(1,), path_length_factor=0)
    assert not report.suite.complete
