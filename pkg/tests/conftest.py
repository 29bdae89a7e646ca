import os
import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

SUITE_BUDGET_S = 120.0
_started = time.perf_counter()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def _whole_suite(config) -> bool:
    return all(os.path.isdir(a) for a in config.args) and not config.option.keyword


def pytest_sessionfinish(session, exitstatus):
    if not _whole_suite(session.config):
        return
    elapsed = time.perf_counter() - _started
    session.config._suite_elapsed = elapsed
    if elapsed >= SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = pytest.ExitCode.TESTS_FAILED


def pytest_terminal_summary(terminalreporter, config):
    elapsed = getattr(config, "_suite_elapsed", None)
    if elapsed is not None:
        ok = elapsed < SUITE_BUDGET_S
        terminalreporter.write_line(
            f"criterion 12: {'PASS' if ok else 'FAIL'}  full suite wall-clock {elapsed:.1f}s "
            f"(budget {SUITE_BUDGET_S:.0f}s)")
