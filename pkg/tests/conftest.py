import numpy as np
import pytest

from ratefit.presets import default_config, merge
from ratefit.qed.rates import DriveConfig, RateSet

TWO_PI = 2.0 * np.pi
KHZ = TWO_PI * 1e3

# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture
def table_rates():
    """(227, 48, 3) kHz device."""
    return RateSet.from_hz(227e3, 48e3, 3e3)


@pytest.fixture
def w01():
    return TWO_PI * 5.0e9


@pytest.fixture
def cfg():
    return default_config()


@pytest.fixture
def quiet_cfg():
    return merge(default_config(), {"noisy": False})


def random_params(rng, n):
    """Random (drive, rates) pairs spanning weak to strong, on and off resonance."""
    out = []
    for _ in range(n):
        rates = RateSet(KHZ * rng.uniform(50, 400), KHZ * rng.uniform(0, 100),
                        KHZ * rng.uniform(0, 50))
        drive = DriveConfig.from_detuning(TWO_PI * 5e9, KHZ * rng.uniform(-2000, 2000),
                                          KHZ * rng.uniform(0, 5000))
        out.append((drive, rates))
    return out
