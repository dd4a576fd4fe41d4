import json

import pytest

from core.report_generator import ReportGenerator

RESULTS = {
    "title": "Threshold sweep: demo",
    "app": "demo",
    "labels": ["a", "b"],
    "targeted": {"suite_length": 7, "complete": True},
    "rows": [
        {"threshold": 0.5, "states": 2},
        {"threshold": 0.8, "states": 9},
    ],
}


@pytest.fixture
def generator():
    return ReportGenerator({})


@pytest.mark.parametrize("path, fmt", [
    ("out.json", "json"),
    ("out.txt", "text"),
    ("out.HTML", "html"),
    ("out", "json"),
])
def test_format_for(path, fmt):
    assert ReportGenerator.format_for(path) == fmt


def test_json_report(tmp_path, generator):
    path = tmp_path / "nested" / "report.json"
    generator.generate(RESULTS, str(path), "json")
    assert json.loads(path.read_text()) == RESULTS
    assert path.read_text().endswith("\n")


def test_text_report(generator):
    text = generator.render_text(RESULTS)
    lines = text.splitlines()
    assert lines[0] == "app: demo"
    assert "labels: a, b" in lines
    assert "targeted.suite_length: 7" in lines
    assert "[rows]" in lines
    assert "title" not in text


def test_html_report(generator):
    html = generator.render_html(RESULTS)
    assert "<title>Threshold sweep: demo</title>" in html
    assert "<h2>rows</h2>" in html
    assert "<td>targeted.complete</td>" in html or "<th>targeted.complete</th>" in html


def test_reports_are_stable(generator):
    assert generator.render_text(RESULTS) == generator.render_text(dict(RESULTS))


def test_unknown_format(tmp_path, generator):
    with pytest.raises(ValueError):
        generator.generate(RESULTS, str(tmp_path / "report.pdf"), "pdf")
