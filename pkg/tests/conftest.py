import pytest

ACCEPTANCE: dict[int, str] = {}
_DETAIL: dict[str, str] = {}


@pytest.fixture
def accept(request):
    """``accept("text")`` attaches a measurement to the criterion's summary line."""
    def note(text):
        _DETAIL[request.node.nodeid] = text
    return note


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    num = marker.args[0]
    detail = _DETAIL.get(item.nodeid, "")
    if rep.passed:
        ACCEPTANCE[num] = f"[{num}] PASS  {item.name}  {detail}".rstrip()
    else:
        msg = str(call.excinfo.value).splitlines()[0][:200] if call.excinfo else ""
        ACCEPTANCE[num] = f"[{num}] FAIL  {item.name}  {detail}  {msg}".rstrip()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[num])
