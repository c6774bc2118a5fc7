import pytest

_REPORT = pytest.StashKey[dict]()


@pytest.fixture
def report(request):
    """Collects one pass/fail line per acceptance criterion."""
    return request.config.stash.setdefault(_REPORT, {})


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_REPORT, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines):
        terminalreporter.write_line(lines[key])
