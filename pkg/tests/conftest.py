import os

import pytest
from hypothesis import HealthCheck, settings

from simplex_approx.tri_basis import WeightParams

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=15, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# a spread of weights: uniform, Chebyshev-like singular, mixed, large
WEIGHTS = [
    WeightParams(0.0, 0.0, 0.0),
    WeightParams(-0.5, -0.5, -0.5),
    WeightParams(0.5, -0.25, 1.0),
    WeightParams(1.0, 2.0, 0.5),
]


@pytest.fixture(params=WEIGHTS, ids=lambda w: "w({:g},{:g},{:g})".format(*w.as_tuple()))
def weight(request):
    return request.param
