import sys

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=[0.6, 0.8, 0.95])
def p_bar(request):
    return request.param


@pytest.fixture(params=[0, 0.5, 1])
def occupation(request):
    return request.param


def set_argv(*args):
    sys.argv = [None] + list(args)


@pytest.fixture
def argv():
    original = sys.argv
    yield set_argv
    sys.argv = original
