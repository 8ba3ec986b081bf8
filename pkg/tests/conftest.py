import functools

import pytest
from hypothesis import HealthCheck, settings

from jetcalc.algcore import builtin_algebra
from jetcalc.bimod import regular_bimodule
from jetcalc.exactla import GF, QQ

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")

F7 = GF(7)
FIELDS = {"Q": QQ, "F7": F7}


@functools.lru_cache(maxsize=None)
def algebra(name: str, field_key: str = "F7"):
    return builtin_algebra(name, FIELDS[field_key])


@functools.lru_cache(maxsize=None)
def regular(name: str, field_key: str = "F7"):
    return regular_bimodule(algebra(name, field_key))


@pytest.fixture(params=["Q", "F7"])
def field_key(request):
    return request.param


@pytest.fixture
def m2():
    return algebra("matrix2")


@pytest.fixture
def m2reg():
    return regular("matrix2")
