import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floorsum.analytic import (
    fejer_closed,
    fejer_direct,
    main_term,
    main_term_case,
    main_term_spec,
    mho_sum,
    prop_bound_envelope,
    prop_envelopes,
    psi,
    psi_grid,
    series_constant,
    theta_exponent,
    vaaler_approx,
    vaaler_grid,
    vaaler_phi,
    vartheta,
    zeta,
)
from floorsum.errors import DomainError, PrecisionError
from floorsum.sieve import mu_point, phi_point
from floorsum.sums import SumParams
from oracles import series_constant_oracle


@pytest.mark.parametrize("s", [1.05, 1.5, 2, 3, 4, 10, 50])
def test_zeta_against_mpmath(s):
    v = zeta(s)
    with mpmath.workdps(40):
        ref = mpmath.zeta(s)
    assert abs(mpmath.mpf(v.value) - ref) <= v.abs_error
    assert v.abs_error <= 1e-14 * abs(v.value)


def test_zeta_closed_forms():
    with mpmath.workdps(40):
        assert abs(zeta(2).value - mpmath.pi**2 / 6) <= zeta(2).abs_error
        assert abs(zeta(4).value - mpmath.pi**4 / 90) <= zeta(4).abs_error
    with pytest.raises(DomainError):
        zeta(1.0)
    with pytest.raises(DomainError):
        zeta(0.5)


@given(st.floats(1.01, 80))
@settings(max_examples=60, deadline=None)
def test_zeta_certificate_property(s):
    v = zeta(s)
    with mpmath.workdps(40):
        assert abs(mpmath.mpf(v.value) - mpmath.zeta(s)) <= v.abs_error


@pytest.mark.parametrize("c", [2.0, 2.25, 2.5, 3.0, 4.0, 7.5])
def test_series_constant_against_zeta_ratio_series(c):
    v = series_constant(c)
    assert v.abs_error <= 1e-13
    assert abs(v.value - series_constant_oracle(c)) <= v.abs_error + 1e-15


def test_series_constant_truncation_nesting():
    # A coarser head with the same tail machinery lands within both certificates.
    fine = series_constant(2.0)
    coarse = series_constant(2.0, eps=1e-9, n=2000, r=3)
    assert abs(fine.value - coarse.value) <= fine.abs_error + coarse.abs_error
    with pytest.raises(PrecisionError):
        series_constant(2.0, eps=1e-13, n=100, r=0)
    with pytest.raises(DomainError):
        series_constant(1.5)
    with pytest.raises(DomainError):
        series_constant(2.0, eps=1e-15)


def test_main_term_cases():
    assert main_term_case(SumParams(2, 1)) == "LOG"
    assert main_term_case(SumParams(1, 1)) == "LINEAR"
    assert main_term_case(SumParams(1, 3)) == "LINEAR"
    assert main_term_case(SumParams(3, 1)) == "NONE"
    with pytest.raises(DomainError):
        main_term_case(SumParams(1.5, 0))
    with pytest.raises(DomainError):
        main_term(SumParams(3, 1), 100)
    assert main_term_spec(SumParams(1, 1)).theta == pytest.approx(5 / 21)


def test_main_term_values():
    v = main_term(SumParams(2, 1), math.e)
    assert v.contains(math.e / (math.pi**2 / 6))
    w = main_term(SumParams(2, 1), 10**6)
    assert w.value == pytest.approx(10**6 * math.log(10**6) * 6 / math.pi**2, rel=1e-15)
    u = main_term(SumParams(1, 1), 1000)
    assert u.value == pytest.approx(1000 * series_constant_oracle(2.0), rel=1e-14)


def test_theta():
    assert theta_exponent(SumParams(1, 1)) == pytest.approx(5 / 21)
    assert theta_exponent(SumParams(1, 2)) == 0
    assert theta_exponent(SumParams(1, 1.5)) == pytest.approx(4.5 / 20.5)
    with pytest.raises(DomainError):
        theta_exponent(SumParams(2, 1))


def test_psi_and_weights():
    assert psi(0.25) == -0.25
    assert psi(1.0) == -0.5
    assert psi(-0.25) == 0.25
    assert vaaler_phi(0) == 1.0
    assert vaaler_phi(0.5) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        vaaler_phi(1.0)


@given(st.floats(-3, 3, allow_nan=False), st.integers(1, 80))
@settings(max_examples=200)
def test_vaaler_bound_pointwise(t, h):
    approx, bound = vaaler_approx(t, h)
    assert abs(psi(t) - approx) <= bound + 1e-10


@given(st.floats(0, 1), st.integers(1, 60))
def test_fejer_forms_agree(t, h):
    assert fejer_closed(t, h) == pytest.approx(fejer_direct(t, h), abs=1e-9, rel=1e-9)
    assert fejer_direct(t, h) >= -1e-12


def test_vaaler_grid_matches_scalar():
    ts = np.linspace(0, 1, 257)
    approx, bound = vaaler_grid(ts, 16)
    for t, a, b in zip(ts, approx, bound):
        sa, sb = vaaler_approx(t, 16)
        assert a == pytest.approx(sa, abs=1e-14)
        assert b == pytest.approx(sb, abs=1e-12)
    assert np.array_equal(psi_grid(ts), [psi(t) for t in ts])


def _vartheta_brute(x, z):
    top = math.floor(x / z)
    s = 0.0
    for m in range(1, top + 1):
        s += mu_point(m) / m * psi(x / m)
    return x * s


@pytest.mark.parametrize("x,z,expected", [(10, 10, -5.0), (10, 5, -2.5)])
def test_vartheta_examples(x, z, expected):
    assert vartheta(x, z).contains(expected)


@given(st.integers(1, 3000), st.integers(1, 50))
@settings(max_examples=80)
def test_vartheta_brute(x, z):
    if z > x:
        return
    v = vartheta(x, z)
    assert abs(v.value - _vartheta_brute(x, z)) <= v.abs_error + 1e-9 * x


def test_mho_against_enumeration():
    p = SumParams(1, 1)
    for x, w, d in [(100, 4, 0), (100, 4, 1), (10**5, 50, 1)]:
        ref = sum(phi_point(v) / v * psi(x / (v + d)) for v in range(w + 1, 2 * w + 1))
        got = mho_sum(x, w, d, p)
        assert abs(got.value - ref) <= got.abs_error + 1e-12


def test_envelopes():
    p = SumParams(1, 1)
    env = prop_envelopes(10**6, 1024, p, 0.01)
    assert env.branch == "small_w"
    assert prop_envelopes(10**6, 10**4, p, 0.01).branch == "large_w"
    assert prop_bound_envelope(10**6, 1024, p, 0.01) == env.small_w
    with pytest.raises(DomainError):
        prop_envelopes(100, 4, SumParams(2, 1), 0.01)
    with pytest.raises(DomainError):
        mho_sum(100, 4, 2, p)
