"""Prints one PASS/FAIL line per acceptance criterion after the run."""

_RESULTS: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: one acceptance criterion per test")


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    key = props.get("criterion")
    if key is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        if report.passed:
            _RESULTS[key] = ("PASS", props.get("detail", ""))
        else:
            msg = str(report.longrepr.reprcrash.message) if hasattr(report.longrepr, "reprcrash") else str(report.longrepr)
            _RESULTS[key] = ("FAIL", msg.splitlines()[0] if msg else "")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for key, title in CRITERIA.items():
        status, detail = _RESULTS.get(key, ("SKIP", "not run"))
        terminalreporter.write_line(f"{status} {key} {title}: {detail}")
