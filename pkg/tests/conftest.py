import pytest

from curvedspp import make_material_pair, spp_scalars


@pytest.fixture(scope="session")
def silver_pair():
    return make_material_pair(1.0, -16.12 + 0.44j, 600.0)


@pytest.fixture(scope="session")
def silver_scalars(silver_pair):
    return spp_scalars(silver_pair)


@pytest.fixture(scope="session")
def silver_lossless_pair():
    return make_material_pair(1.0, -16.12 + 0.0j, 600.0)


@pytest.fixture(scope="session")
def silver_lossless_scalars(silver_lossless_pair):
    return spp_scalars(silver_lossless_pair)


@pytest.fixture(scope="session")
def gold_pair():
    return make_material_pair(1.0, -24.15 + 1.51j, 800.0)
