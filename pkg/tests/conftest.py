import pytest

_LINES_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES_KEY] = []


@pytest.fixture
def acceptance(request):
    """Collects one verdict line per acceptance criterion for the summary."""
    lines = request.config.stash[_LINES_KEY]

    def record(number, title, passed, seconds, limit, detail):
        ok = passed and seconds < limit
        lines.append((number, f"{'PASS' if ok else 'FAIL'} [{number:2d}] {title}: {detail}; "
                              f"{seconds:.2f} s (limit {limit:g} s)"))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
