import pytest

from stickybounds.geometry import RadialProfile, make_geometry, normalize_weights


@pytest.fixture(scope="session")
def flat_unit():
    return make_geometry("flat_disk", 1.0)


@pytest.fixture(scope="session")
def flat_unit_const(flat_unit):
    one = RadialProfile.constant(1.0)
    return normalize_weights(flat_unit, one, one)


@pytest.fixture(scope="session")
def flat_unit_curv(flat_unit):
    return flat_unit.exact_curvature()
