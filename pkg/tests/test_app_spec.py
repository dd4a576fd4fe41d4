import textwrap

import pytest

from core.app_spec import (
    GLOBAL,
    Event,
    Finish,
    SetStatus,
    StartActivity,
    StatusMap,
    ViewDef,
    events_for_view,
    parse_app_spec,
    serialize_app_spec,
    validate,
)
from core.exceptions import SpecParseError, SpecValidationError
from tests.conftest import BUNDLED_APPS, SMALL_APPS, spec_path


def _spec(body: str):
    return parse_app_spec(textwrap.dedent(body))


def _issues(body: str):
    with pytest.raises(SpecValidationError) as excinfo:
        _spec(body)
    return [issue.message for issue in excinfo.value.issues]


MINIMAL = """
name: minimal
entry_activity: Main
activities:
  - id: Main
    views:
      - {id: btn, view_type: Button, position: [0, 0], initial_status: {}}
    handlers:
      - on: {view: btn, event: Click}
        effects: [NoOp]
"""


@pytest.mark.parametrize("name", BUNDLED_APPS + SMALL_APPS)
def test_bundled_specs_are_valid(load_spec, name):
    spec = load_spec(name)
    assert spec.activity(spec.entry_activity) is not None
    assert validate(spec) == []


def test_tomdroid_structure(tomdroid):
    assert tomdroid.entry_activity == "TomDroidActivity"
    assert [a.id for a in tomdroid.activities] == ["TomDroidActivity", "PreferencesActivity"]
    assert tomdroid.label_universe == {"deleteNote", "undeleteNote"}
    preferences = tomdroid.activity("PreferencesActivity")
    assert preferences.view("show_deleted").initial_status == StatusMap.of({"checked": False})
    done = [h for h in preferences.handlers if h.on.view == "done"][0]
    assert done.effects == (Finish(),)


def test_on_key_is_not_read_as_boolean(one_button):
    handler = one_button.activities[0].handlers[0]
    assert handler.on.view == "btn"
    assert handler.on.event == "Click"


def test_set_status_can_target_another_activity(tomdroid):
    settings_handlers = [h for h in tomdroid.activity("TomDroidActivity").handlers if h.on.view == "settings"]
    assert len(settings_handlers) == 4
    assert StartActivity("PreferencesActivity") in settings_handlers[0].effects
    assert settings_handlers[0].effects[0] == SetStatus("note", "focused", False)
    assert SetStatus("show_deleted", "checked", True, "PreferencesActivity") in settings_handlers[1].effects


def test_events_for_edit_text_expand_palette():
    view = ViewDef("field", "EditText", (0, 0), StatusMap.of({"text": ""}))
    events = events_for_view(view, ("a", "bb"))
    assert events == (
        Event("field", "Click"),
        Event("field", "ClearText"),
        Event("field", "TypeText", 0),
        Event("field", "TypeText", 1),
    )


def test_events_for_progress_bar_use_declared_values():
    view = ViewDef("bar", "ProgressBar", (0, 0), StatusMap.of({"value": 1}), values=(1, 5))
    assert events_for_view(view) == (Event("bar", "SetValue", 1), Event("bar", "SetValue", 5))


@pytest.mark.parametrize("view_type, kinds", [
    ("Button", ["Click", "LongClick", "Press"]),
    ("ImageView", ["Click", "LongClick", "Press"]),
    ("TextView", ["Click", "LongClick", "Press"]),
    ("CheckBox", ["Click"]),
    ("RadioButton", ["Click"]),
    ("ListView", ["Click", "Scroll"]),
])
def test_events_for_view_types(view_type, kinds):
    view = ViewDef("v", view_type, (0, 0))
    assert [event.kind for event in events_for_view(view)] == kinds


def test_event_string_form():
    assert str(Event("note", "LongClick")) == "note.LongClick"
    assert str(Event("bill", "TypeText", 0)) == "bill.TypeText[0]"
    assert str(Event(GLOBAL, "Back")) == "GLOBAL.Back"


def test_malformed_document_reports_position():
    with pytest.raises(SpecParseError) as excinfo:
        parse_app_spec(spec_path("malformed").read_text())
    assert excinfo.value.line is not None
    assert "line" in str(excinfo.value)


def test_non_mapping_document_is_a_parse_error():
    with pytest.raises(SpecParseError):
        parse_app_spec("- just\n- a list\n")


def test_minimal_spec_defaults():
    spec = _spec(MINIMAL)
    assert spec.global_events == ("Back",)
    assert spec.text_palette == ()
    assert spec.activities[0].launch_mode == "Standard"


def test_dangling_activity_reference():
    messages = _issues(MINIMAL.replace("effects: [NoOp]", "effects: [{StartActivity: Nowhere}]"))
    assert any("dangling activity reference" in m for m in messages)


def test_duplicate_activity_id():
    body = MINIMAL + """
  - id: Main
    views: []
"""
    messages = _issues(body)
    assert any("duplicate activity id" in m for m in messages)


def test_unsupported_launch_mode():
    messages = _issues(MINIMAL.replace("  - id: Main\n", "  - id: Main\n    launch_mode: SingleInstance\n"))
    assert any("unsupported launch mode" in m for m in messages)


def test_event_not_applicable_to_view_type():
    messages = _issues(MINIMAL.replace("event: Click", "event: TypeText"))
    assert any("event not applicable to view type" in m for m in messages)


def test_all_errors_are_reported_together():
    body = MINIMAL.replace("event: Click", "event: Scroll").replace(
        "effects: [NoOp]", "effects: [{StartActivity: Nowhere}]"
    )
    messages = _issues(body)
    assert len(messages) >= 2


def test_ambiguous_handlers():
    body = MINIMAL + """      - on: {view: btn, event: Click}
        effects: [Quit]
"""
    messages = _issues(body)
    assert any("ambiguous handlers" in m for m in messages)


def test_exclusive_guards_are_not_ambiguous(tomdroid):
    # four settings handlers share a trigger but differ on note/trash enablement
    assert validate(tomdroid) == []


def test_progress_bar_requires_values():
    body = MINIMAL.replace("view_type: Button", "view_type: ProgressBar").replace(
        "event: Click", "event: SetValue"
    )
    messages = _issues(body)
    assert any("ProgressBar requires" in m for m in messages)


def test_unknown_status_attribute_and_bad_value():
    messages = _issues(MINIMAL.replace("initial_status: {}", "initial_status: {colour: red, enabled: 3}"))
    assert any("unknown status attribute" in m for m in messages)
    assert any("invalid status value" in m for m in messages)


def test_global_handler_requires_enabled_global_event():
    body = MINIMAL + """      - on: {view: GLOBAL, event: Rotate}
        effects: [NoOp]
"""
    messages = _issues(body)
    assert any("not enabled" in m for m in messages)


def test_edit_text_requires_palette():
    body = MINIMAL.replace("view_type: Button", "view_type: EditText")
    messages = _issues(body)
    assert any("text_palette" in m for m in messages)


def test_dangling_view_reference_in_guard():
    body = MINIMAL.replace(
        "on: {view: btn, event: Click}",
        "on: {view: btn, event: Click, guard: {all: [{view: ghost, attribute: enabled, equals: true}]}}",
    )
    messages = _issues(body)
    assert any("dangling view reference" in m for m in messages)


@pytest.mark.parametrize("name", BUNDLED_APPS + SMALL_APPS)
def test_serialize_then_parse_is_identity(load_spec, name):
    spec = load_spec(name)
    assert parse_app_spec(serialize_app_spec(spec)) == spec


def test_json_documents_are_accepted():
    spec = parse_app_spec(
        '{"name": "j", "entry_activity": "Main", "activities": [{"id": "Main", "views": '
        '[{"id": "b", "view_type": "Button", "position": [0, 0]}], "handlers": []}]}'
    )
    assert spec.activities[0].views[0].id == "b"
