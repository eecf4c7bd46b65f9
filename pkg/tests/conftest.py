import os

import pytest
from hypothesis import HealthCheck, settings

from ncmotive.numkernel import _backend

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def _backends():
    names = ["python"]
    try:
        from ncmotive.numkernel import _ckernels  # noqa: F401
        names.append("cython")
    except ImportError:
        pass
    return names


@pytest.fixture(params=_backends())
def backend(request):
    """Run a test once per available kernel backend."""
    old = _backend.use_backend(request.param)
    yield request.param
    _backend.use_backend(old)
