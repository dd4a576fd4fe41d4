"""
Shared test fixtures
"""

from pathlib import Path

import pytest

from core.app_spec import load_app_spec

ROOT = Path(__file__).resolve().parent.parent
APPS_DIR = ROOT / "apps"
FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

BUNDLED_APPS = ("tomdroid", "tippytipper", "hotdeath")
SMALL_APPS = ("one_button", "two_checkbox", "unreachable_label")


def pytest_addoption(parser):
    parser.addoption(
        "--update-golden", action="store_true", default=False,
        help="rewrite the files under tests/golden from the current output",
    )


def spec_path(name: str) -> Path:
    bundled = APPS_DIR / f"{name}.yaml"
    return bundled if bundled.exists() else FIXTURES_DIR / f"{name}.yaml"


@pytest.fixture(scope="session")
def load_spec():
    cache = {}

    def _load(name: str):
        if name not in cache:
            cache[name] = load_app_spec(spec_path(name))
        return cache[name]

    return _load


@pytest.fixture(scope="session")
def tomdroid(load_spec):
    return load_spec("tomdroid")


@pytest.fixture(scope="session")
def tippytipper(load_spec):
    return load_spec("tippytipper")


@pytest.fixture(scope="session")
def hotdeath(load_spec):
    return load_spec("hotdeath")


@pytest.fixture(scope="session")
def one_button(load_spec):
    return load_spec("one_button")


@pytest.fixture(scope="session")
def two_checkbox(load_spec):
    return load_spec("two_checkbox")


@pytest.fixture(scope="session")
def unreachable_label(load_spec):
    return load_spec("unreachable_label")


@pytest.fixture
def golden(request):
    """Compare text with tests/golden/<name>; missing files are written from the first run."""
    update = request.config.getoption("--update-golden")

    def _check(name: str, actual: str):
        path = GOLDEN_DIR / name
        if update or not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(actual.encode("utf-8"))
        assert actual.encode("utf-8") == path.read_bytes(), f"{name} differs from its golden file"

    return _check
