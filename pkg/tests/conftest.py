"""Test plumbing: print one pass/fail line per acceptance check."""

_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" in report.nodeid and report.when == "call":
        _acceptance[report.nodeid] = report.passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance:
        return
    terminalreporter.section("acceptance summary")
    for nodeid, passed in _acceptance.items():
        label = nodeid.split("::")[-1]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}")
