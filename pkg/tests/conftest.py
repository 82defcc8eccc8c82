import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("seeded", derandomize=True, deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("seeded")

os.environ.setdefault("HOPFCERT_CACHE_DIR", "/tmp/hc")

ACCEPTANCE: dict = {}


def pytest_addoption(parser):
    parser.addoption("--include-sz32", action="store_true", default=False,
                     help="run the Sz(32) census criterion")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, label): acceptance criterion")
    config.addinivalue_line("markers", "slow: long-running check")


@pytest.fixture
def include_sz32(request):
    return request.config.getoption("--include-sz32") or os.environ.get("HOPFCERT_SZ32") == "1"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.skipped):
        status = "SKIP" if rep.skipped else ("PASS" if rep.passed else "FAIL")
        ACCEPTANCE[mark.args[0]] = (mark.args[1], status)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(ACCEPTANCE):
        label, status = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {label}")
