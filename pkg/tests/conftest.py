import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures" / "v1"

_CRITERIA: dict = {}


def record(key: str, title: str, ok: bool, detail: str = "") -> None:
    """Register one acceptance line; the summary hook prints them all."""
    _CRITERIA[key] = (title, ok, detail)
    print(f"{key} {'PASS' if ok else 'FAIL'} {title} {detail}".rstrip())


@pytest.fixture
def criterion(request):
    """Yields a recorder; a test that raises is recorded as FAIL."""
    key, title = request.node.get_closest_marker("criterion").args
    state = {"detail": ""}

    def note(detail):
        state["detail"] = detail

    yield note
    failed = getattr(request.node, "rep_call", None)
    ok = failed is not None and failed.passed
    record(key, title, ok, state["detail"])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(key, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip())


@pytest.fixture(scope="session")
def flagship():
    from occultist.gallery import assemble_free_product_scene

    return assemble_free_product_scene()


@pytest.fixture(scope="session")
def flagship_tree(flagship):
    from occultist.bass_serre import expand_tree

    return expand_tree(flagship.gog, 4)
