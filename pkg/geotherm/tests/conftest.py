import numpy as np
import pytest

from geotherm.app.analysis import ThermoGeometry
from geotherm.app.models import build_custom_model, build_pmi_model, build_rn_model


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# Curvatures are expensive; one geometry per model for the whole session


@pytest.fixture(scope="session")
def rn_geometry():
    return ThermoGeometry(build_rn_model(8.0))


@pytest.fixture(scope="session")
def pmi4_geometry():
    return ThermoGeometry(build_pmi_model(4, s="5/2", l=1.0))


@pytest.fixture(scope="session")
def pmi6_geometry():
    return ThermoGeometry(build_pmi_model(6, s="5/2", l=1.0))


@pytest.fixture(scope="session")
def pmi4_l_geometry():
    return ThermoGeometry(build_pmi_model(4, s="5/2", l=None, l_is_variable=True))


@pytest.fixture(scope="session")
def quadratic_geometry():
    return ThermoGeometry(build_custom_model(["S", "Q"], "S^2 + Q^2"))
