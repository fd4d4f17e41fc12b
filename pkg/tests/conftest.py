import sys

import numpy as np
import pytest

from sisfit import FiberizedSignal, GridConfig, MeasurementSet, SamplingKernel


def crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_signal(config, rng):
    return FiberizedSignal(config, crandn(rng, config.T, config.width))


def random_kernel(config, rng):
    return SamplingKernel(config, crandn(rng, config.T, config.width))


def random_measurements(config, m, rng):
    return MeasurementSet(config, crandn(rng, m, 2 * config.K + 1))


def single_fiber_kernel(config, value=1.0):
    fib = np.zeros((config.T, config.width), complex)
    fib[:, config.L] = value
    return SamplingKernel(config, fib)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def cfg():
    return GridConfig(n0=2, G=8, L=2, K=4, lam=1.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split("criterion")[1].split()[0])):
        terminalreporter.write_line(line)
