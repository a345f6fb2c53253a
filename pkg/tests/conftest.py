from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from qhfib import catalog

settings.register_profile(
    "suite",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

CUTOFF = Fraction(6)


@pytest.fixture(scope="session")
def ruled():
    return catalog.build("ruled")


@pytest.fixture(scope="session")
def rotation():
    return catalog.build("sphere-rotation")


@pytest.fixture(scope="session")
def sphere_product():
    return catalog.build("sphere-product")


@pytest.fixture(scope="session")
def trivial_product():
    return catalog.build("quantum-trivial-product")
