from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def cantor():
    from assouad.systems import cantor_system

    return cantor_system()


@pytest.fixture
def cantor_uniform(cantor):
    from assouad.measures import ConstantWeights, IfsMeasure

    return IfsMeasure(cantor, ConstantWeights((Fraction(1, 2), Fraction(1, 2))))


@pytest.fixture
def gibbs():
    from assouad.reproduce import gibbs_cantor

    return gibbs_cantor()
