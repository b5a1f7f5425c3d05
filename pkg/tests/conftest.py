import math

import pytest

from lattice_qnd.atomic_structure import (PopulationDistribution, ProbeGeometry,
                                          single_line_manifold, sr87_blue_manifold)


@pytest.fixture(scope="session")
def sr_manifold():
    return sr87_blue_manifold()


@pytest.fixture(scope="session")
def line_manifold():
    return single_line_manifold()


@pytest.fixture(scope="session")
def geometry():
    return ProbeGeometry(10e-6, 37e-6)


@pytest.fixture(scope="session")
def unpolarized():
    return PopulationDistribution.unpolarized("9/2", 1e4)


OMEGA_90 = 2 * math.pi * 90e6


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.REPORT, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
