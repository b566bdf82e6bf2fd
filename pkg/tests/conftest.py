import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# Numeric property tests run numpy-heavy bodies; wall-clock deadlines only
# add flakiness on shared machines.
settings.register_profile(
    "numeric",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")


@pytest.fixture
def scene_factory():
    """UcaConfig factory with the reference geometry (100 GHz, 0.5 m radii, 100 m)."""
    from swmimo import UcaConfig

    def make(n=8, rt=0.5, rr=0.5, d=100.0, f=100e9):
        return UcaConfig(n_antennas=n, radius_tx=rt, radius_rx=rr,
                         link_distance=d, carrier_freq=f)

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
