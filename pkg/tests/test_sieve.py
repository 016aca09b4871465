import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floorsum.config import configured
from floorsum.errors import CapacityError, DomainError
from floorsum.sieve import (
    factorize,
    is_prime,
    mu_point,
    phi_point,
    primes_up_to,
    segment_phi,
    sieve_mu,
    sieve_phi,
)
from oracles import mu_trial, phi_gcd, phi_trial


def test_small_tables():
    assert sieve_phi(10).tolist() == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]
    assert sieve_mu(4).tolist() == [1, -1, -1, 0]
    assert sieve_phi(1).tolist() == [1]


def test_phi_against_gcd_count():
    table = sieve_phi(500)
    assert table.tolist() == [phi_gcd(n) for n in range(1, 501)]


def test_mu_against_trial_division():
    table = sieve_mu(3000)
    assert table.tolist() == [mu_trial(n) for n in range(1, 3001)]


def test_table_indexes_by_integer():
    t = segment_phi(10, 12)
    assert t.tolist() == [4, 10, 4]
    assert t[11] == 10
    with pytest.raises(IndexError):
        t[9]
    with pytest.raises(ValueError):
        t.values[0] = 5


def test_segments_match_full_table():
    full = sieve_phi(20000).values
    seg = segment_phi(12345, 20000, segment_size=777)
    assert np.array_equal(seg.values, full[12344:])


def test_point_values():
    assert phi_point(10**9 + 7) == 10**9 + 6
    assert phi_point(2**40) == 2**39
    assert mu_point(30) == -1
    assert mu_point(12) == 0
    assert phi_point(1) == 1


def test_large_semiprime_factorisation():
    p, q = 2147483647, 2147483629
    assert factorize(p * q) == {q: 1, p: 1}
    assert phi_point(p * q) == (p - 1) * (q - 1)
    assert factorize(2**63 - 1) == {7: 2, 73: 1, 127: 1, 337: 1, 92737: 1, 649657: 1}


def test_primes_and_primality():
    ps = primes_up_to(100).tolist()
    assert ps == [n for n in range(2, 101) if all(n % d for d in range(2, n))]
    assert is_prime(2**61 - 1)
    assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7


@given(st.integers(1, 10**6))
def test_phi_point_matches_trial(n):
    assert phi_point(n) == phi_trial(n)


@given(st.integers(2, 10**12))
@settings(max_examples=200)
def test_factorisation_reconstructs(n):
    f = factorize(n)
    prod = 1
    for p, e in f.items():
        assert is_prime(p)
        prod *= p**e
    assert prod == n


@given(st.integers(1, 5 * 10**4), st.integers(0, 3000))
@settings(max_examples=50)
def test_segment_property(lo, width):
    hi = lo + width
    seg = segment_phi(lo, hi, segment_size=1000)
    assert seg.tolist() == [phi_point(n) for n in range(lo, hi + 1)]


@given(st.integers(1, 3000), st.integers(1, 3000))
@settings(max_examples=100)
def test_phi_multiplicative_on_coprimes(a, b):
    import math

    if math.gcd(a, b) == 1:
        assert phi_point(a * b) == phi_point(a) * phi_point(b)


def test_domain_and_capacity():
    with pytest.raises(DomainError):
        sieve_phi(0)
    with pytest.raises(DomainError):
        segment_phi(5, 4)
    with pytest.raises(DomainError):
        factorize(0)
    with configured(memory_cap_bytes=2**24):
        with pytest.raises(CapacityError):
            sieve_phi(10**7)
