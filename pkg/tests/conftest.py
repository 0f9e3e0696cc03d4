_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[report.nodeid] = report


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, report in sorted(_criteria.items()):
        label = nodeid.rsplit("[", 1)[-1].rstrip("]")
        status = "PASS" if report.passed else "FAIL"
        line = f"{status}  {label}"
        if report.failed:
            message = str(report.longrepr.reprcrash.message) if hasattr(report.longrepr, "reprcrash") else ""
            line += f": {message.splitlines()[0] if message else 'failed'}"
        terminalreporter.write_line(line)
