from __future__ import annotations

import pytest

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if "test_acceptance.py" not in item.nodeid:
        return
    label = item.function.__doc__.strip().splitlines()[0] if item.function.__doc__ else item.name
    detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
    failed = report.failed or (report.when == "call" and not report.passed and not report.skipped)
    prev = _ACCEPTANCE.get(item.nodeid)
    if failed:
        _ACCEPTANCE[item.nodeid] = ("FAIL", f"{label}  {detail}".rstrip())
    elif report.when == "call" and (prev is None or prev[0] != "FAIL"):
        _ACCEPTANCE[item.nodeid] = ("PASS", f"{label}  {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_ACCEPTANCE):
        verdict, text = _ACCEPTANCE[nodeid]
        terminalreporter.write_line(f"{verdict}  {text}")
    passed = sum(1 for v, _ in _ACCEPTANCE.values() if v == "PASS")
    terminalreporter.write_line(f"{passed}/{len(_ACCEPTANCE)} acceptance criteria passed")
