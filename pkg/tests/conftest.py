import pytest

_RESULTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS] = []


@pytest.fixture
def acceptance_record(request):
    results = request.config.stash[_RESULTS]

    def record(number, name, ok, detail):
        results.append((number, name, ok, detail))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = sorted(config.stash.get(_RESULTS, []))
    if not results:
        return
    from test_acceptance import format_line

    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in results:
        terminalreporter.write_line(format_line(number, name, ok, detail))
