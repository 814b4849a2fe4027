import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance_line(request):
    """Record one ``CRITERION n: PASS|FAIL`` line; all are printed in the terminal summary."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(text):
        lines.append(text)
        print(text)

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
