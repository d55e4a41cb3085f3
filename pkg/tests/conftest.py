import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from gammadev.config import RunConfig  # noqa: E402
from gammadev.profile import build_profile  # noqa: E402
from gammadev.sweep import run_sweep  # noqa: E402


@pytest.fixture(scope="session")
def ref_config():
    return RunConfig()


@pytest.fixture(scope="session")
def ref_well(ref_config):
    return ref_config.well()


@pytest.fixture(scope="session")
def ref_profile(ref_well):
    return build_profile(ref_well)


@pytest.fixture(scope="session")
def ref_sweep(ref_config):
    return run_sweep(ref_config)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(LINES):
            terminalreporter.write_line(LINES[k])
