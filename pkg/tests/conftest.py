import pytest
from hypothesis import HealthCheck, settings

from smoothext.numerics import backend as sc

settings.register_profile(
    "default",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _fresh_precision():
    sc.set_precision(sc.DEFAULT_PRECISION)
    yield
    sc.set_precision(sc.DEFAULT_PRECISION)
