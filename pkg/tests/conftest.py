import pytest

from rotfric import Drude, Polarizability, SpinningBody, UnitSystem

GOLD_SIGMA0 = 1.6e7     # S/m
RADIUS = 10e-9          # m


@pytest.fixture
def units():
    return UnitSystem()


@pytest.fixture
def gold(units):
    return Drude(units.to_internal(GOLD_SIGMA0, "conductivity"))


@pytest.fixture
def gold_sphere(units, gold):
    return Polarizability(units.to_internal(RADIUS, "length"), gold)


@pytest.fixture
def make_body(gold_sphere):
    def make(T, omega0):
        return SpinningBody(gold_sphere, T, omega0)
    return make
