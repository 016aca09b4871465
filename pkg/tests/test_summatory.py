import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floorsum.errors import DomainError
from floorsum.sieve import sieve_mu, sieve_phi
from floorsum.summatory import build_cache, mertens, totient_summatory, walfisz_ratio
from oracles import phi_sum_memo


def test_known_values():
    assert totient_summatory(1) == 1
    assert totient_summatory(10) == 32
    assert totient_summatory(100) == 3044
    assert mertens(1) == 1
    assert mertens(2) == 0
    assert mertens(100) == 1


def test_prefix_sums_up_to_1e4():
    phi = np.cumsum(sieve_phi(10**4).values)
    mu = np.cumsum(sieve_mu(10**4).values)
    for n in range(1, 10**4 + 1, 37):
        assert totient_summatory(n) == phi[n - 1]
        assert mertens(n) == mu[n - 1]


@pytest.mark.parametrize("n", [10**6 + 3, 10**9 + 7, 6 * 10**9 + 1])
def test_against_memo_recursion(n):
    assert totient_summatory(n) == phi_sum_memo(n)


def test_beyond_int64():
    # Phi(10^12) exceeds 2^64; the lifted value must be exact.
    assert totient_summatory(10**12) == 303963550927059804025910
    assert mertens(10**12) == 62366


def test_cache_serves_every_quotient():
    n = 123457
    cache = build_cache(n, "totient", threshold=400)
    phi = np.cumsum(sieve_phi(n).values)
    for q in cache.quotients():
        assert totient_summatory(q, cache) == phi[q - 1]
    with pytest.raises(DomainError):
        mertens(n, cache)
    with pytest.raises(DomainError):
        totient_summatory(n - 1, cache)


@given(st.integers(1, 3 * 10**5), st.data())
@settings(max_examples=40, deadline=None)
def test_threshold_does_not_change_values(n, data):
    import math

    t = data.draw(st.integers(math.isqrt(n), n))
    a = build_cache(n, "totient", threshold=t).value(n)
    b = build_cache(n, "mertens", threshold=t).value(n)
    assert a == totient_summatory(n)
    assert b == mertens(n)


@given(st.integers(2, 10**7))
@settings(max_examples=25, deadline=None)
def test_phi_sum_parity_and_bounds(n):
    # phi(1) = phi(2) = 1 and phi(m) is even for m > 2.
    v = totient_summatory(n)
    assert v % 2 == 0
    assert n <= v <= n * (n + 1) // 2


def test_walfisz_ratio():
    assert abs(walfisz_ratio(10**7) - 1) <= 1e-4
    with pytest.raises(DomainError):
        walfisz_ratio(1)


def test_domain():
    with pytest.raises(DomainError):
        totient_summatory(0)
    with pytest.raises(DomainError):
        build_cache(100, "divisor")
