import pytest

from stackwise import EXIT_OK, run
from tests.conftest import BUNDLED_APPS, spec_path

# one_button and two_checkbox goldens are written out by hand from the
# exploration order; the bundled app files are refreshed with --update-golden


def _build(tmp_path, name):
    out, dot = tmp_path / f"{name}.model.json", tmp_path / f"{name}.dot"
    status = run(["--no-banner", "build", str(spec_path(name)), "--out", str(out), "--dot", str(dot)])
    assert status == EXIT_OK
    return out.read_text(encoding="utf-8"), dot.read_text(encoding="utf-8")


@pytest.mark.parametrize("name", ["one_button", "two_checkbox", *BUNDLED_APPS])
def test_build_matches_golden(tmp_path, golden, name):
    model_json, dot = _build(tmp_path, name)
    golden(f"{name}.model.json", model_json)
    golden(f"{name}.dot", dot)


def test_one_button_model_is_a_single_screen(tmp_path):
    model_json, dot = _build(tmp_path, "one_button")
    assert model_json.endswith("}\n")
    assert dot.endswith("}\n")
    assert dot.count(" -> ") == 4


def test_compare_matches_golden(tmp_path, golden):
    out = tmp_path / "tomdroid.compare.json"
    status = run(["--no-banner", "compare", str(spec_path("tomdroid")),
                  "--labels", "deleteNote,undeleteNote", "--out", str(out)])
    assert status == EXIT_OK
    golden("tomdroid.compare.json", out.read_text(encoding="utf-8"))
