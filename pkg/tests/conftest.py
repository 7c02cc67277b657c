import random

import pytest

from quantmod import counterexample as ce, data


@pytest.fixture(scope="session")
def so3():
    return data.load_lie("so3")


@pytest.fixture(scope="session")
def k_alg():
    return data.load_lie("k")


@pytest.fixture(scope="session")
def kk():
    return data.load_lie("k-plus-k")


@pytest.fixture(scope="session")
def so3_r2():
    return ce.build(data.load_counterexample("so3-r2"))


@pytest.fixture(scope="session")
def so3_kk():
    return ce.build(data.load_counterexample("so3-kk"))


@pytest.fixture
def rng(request):
    # one fixed seed per test, derived from its name so reruns are identical
    return random.Random(sum(map(ord, request.node.name)))
