import numpy as np
import pytest

from dualbandsim import SystemConfig, config_from_mapping

# Acceptance pass/fail lines collected here and echoed after the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_cfg() -> SystemConfig:
    """Full Table-like physics with shrunken bandwidths (12 / 120 subcarriers)."""
    return config_from_mapping({
        "sub6.bandwidth_hz": "720e3",
        "mmwave.bandwidth_hz": "7.2e6",
        "realizations": "60",
        "seed": "42",
    })


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
