from functools import lru_cache

import numpy as np
import pytest

from moulin.finite_field import PrimeField, make_layered_stars, make_vandermonde_stars
from moulin.moulin_code import build_instance


@lru_cache(maxsize=None)
def vandermonde_instance(n, k, d, s, p=None):
    field = PrimeField(p or _default_prime(n))
    return build_instance(n, k, d, s, field, make_vandermonde_stars(n, k, d, field))


@lru_cache(maxsize=None)
def layered_instance(k, s, p=2):
    field = PrimeField(p)
    return build_instance(k + 1, k, k, s, field, make_layered_stars(k, field))


def _default_prime(n):
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23):
        if q >= n:
            return q
    raise ValueError(n)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
