import pytest

# Acceptance tests register (criterion, passed) here; a terminal-summary hook
# prints one line per criterion at the end of the run.
_ACCEPTANCE_RESULTS = []


@pytest.fixture
def acceptance():
    def record(criterion: str, passed: bool, detail: str = ""):
        _ACCEPTANCE_RESULTS.append((criterion, passed, detail))
        assert passed, f"acceptance criterion failed: {criterion} {detail}"
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {criterion}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
