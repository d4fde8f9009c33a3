import pytest

_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS] = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert."""
    lines = request.config.stash[_VERDICTS]

    def _verdict(name, checks):
        ok = all(passed for passed, _ in checks)
        detail = "; ".join(f"{'ok' if passed else 'FAILED'}: {msg}" for passed, msg in checks)
        line = f"{'PASS' if ok else 'FAIL'} [{name}] {detail}"
        lines.append(line)
        print(line)
        assert ok, detail

    return _verdict


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
