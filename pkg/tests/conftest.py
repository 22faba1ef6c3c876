import pytest

_VERDICTS = {}


class Recorder:
    """Collects one verdict per acceptance criterion for the terminal summary."""

    def record(self, number, title, ok, detail=""):
        prev = _VERDICTS.get(number)
        ok = bool(ok) and (prev is None or prev[1])
        _VERDICTS[number] = (title, ok, detail if prev is None else f"{prev[2]}; {detail}")
        return ok


@pytest.fixture(scope="session")
def acceptance():
    return Recorder()


def pytest_runtest_logreport(report):
    # a criterion whose test errored out before recording still shows as FAIL
    crit = getattr(report, "criterion", None)
    if crit and report.failed and crit[0] not in _VERDICTS:
        _VERDICTS[crit[0]] = (crit[1], False, "test raised before recording")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        title, ok, detail = _VERDICTS[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} [{number:2d}] {title}: {detail}")
