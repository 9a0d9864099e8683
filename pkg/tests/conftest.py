import re

_results = {}


def _criterion(nodeid):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_", nodeid)
    return int(m.group(1)) if m else None


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: numbered acceptance criterion")


def pytest_runtest_logreport(report):
    n = _criterion(report.nodeid)
    if n is None:
        return
    ok, secs = _results.get(n, (True, 0.0))
    if report.failed or (report.when == "call" and report.skipped):
        ok = False
    _results[n] = (ok, secs + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        ok, secs = _results[n]
        terminalreporter.write_line(f"ACCEPTANCE criterion {n} ... {'PASS' if ok else 'FAIL'} ({secs:.2f}s)")
