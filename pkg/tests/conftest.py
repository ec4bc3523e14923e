import os
import random

import pytest
from hypothesis import HealthCheck, settings

from tropx import io

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")

settings.register_profile(
    "tropx", derandomize=True, deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("tropx")


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=int(os.environ.get("TROPX_SEED", 0)),
                     help="seed for the randomized suites")


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed):
    return random.Random(seed)


def fixture_path(name):
    return os.path.join(FIXTURES, name)


def load_complex(name):
    return io.complex_from_json(io.read_json(fixture_path(name)))


def load_divisor(name, W):
    return io.divisor_from_json(io.read_json(fixture_path(name)), W)
