import math

import pytest

from capillary_lab import ExperimentRunner, Settings
from capillary_lab.capillary import bridge_in_wedge, cap_in_halfspace
from capillary_lab.charts import hemisphere, sphere, torus
from capillary_lab.config import ORDER_ENV_VAR


@pytest.fixture(autouse=True)
def clean_order_env(monkeypatch):
    """Keep a developer's CAPILLARY_LAB_ORDER out of the tests."""
    monkeypatch.delenv(ORDER_ENV_VAR, raising=False)


@pytest.fixture
def settings():
    return Settings()


@pytest.fixture
def unit_sphere():
    return sphere(2, 1.0)


@pytest.fixture
def unit_hemisphere():
    return hemisphere(2, 1.0)


@pytest.fixture
def standard_torus():
    return torus(2.0, 1.0)


@pytest.fixture
def hemisphere_cap(settings):
    return cap_in_halfspace(1.0, 0.5 * math.pi, settings=settings)


@pytest.fixture
def obtuse_cap(settings):
    return cap_in_halfspace(1.0, 2 * math.pi / 3, settings=settings)


@pytest.fixture
def wedge_bridge(settings):
    return bridge_in_wedge(1.0, math.pi / 6, 5 * math.pi / 6, settings=settings)


@pytest.fixture
def runner():
    """Runner with its worker pool started."""
    with ExperimentRunner(settings=Settings()) as active:
        yield active
