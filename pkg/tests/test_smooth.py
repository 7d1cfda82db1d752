import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from gaplab.errors import CapacityError, ParameterError
from gaplab.smooth import (psi_exact, psi_rankin_bound, smooth_survivor_bound, survivor_estimate,
                           survivor_forms)
from oracles import brute_psi, bytearray_sieve


def test_examples():
    assert psi_exact(10, 2) == 4
    assert psi_exact(100, 5) == brute_psi(100, 5) == 34
    assert psi_exact(50, 50) == 50 and psi_exact(50, 97) == 50


@pytest.mark.parametrize("x", [1, 2, 3, 31, 1000, 10**6, 10**9])
def test_psi_y2_is_bit_count(x):
    assert psi_exact(x, 2) == math.floor(math.log2(x)) + 1


def test_psi_matches_brute_force_sample():
    for x in (31, 97, 360, 1000, 4321):
        for y in (2, 3, 5, 11, 29, 97):
            assert psi_exact(x, y) == brute_psi(x, y)


def test_psi_larger_spot_value():
    # 7-smooth numbers up to 10^6 (humble numbers): counted by nested loops
    count = 0
    a = 1
    while a <= 10**6:
        b = a
        while b <= 10**6:
            c = b
            while c <= 10**6:
                d = c
                while d <= 10**6:
                    count += 1
                    d *= 7
                c *= 5
            b *= 3
        a *= 2
    assert psi_exact(10**6, 7) == count


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3000), st.integers(2, 60))
def test_psi_monotone(x, y):
    assert psi_exact(x, y) <= psi_exact(x + 1, y)
    assert psi_exact(x, y) <= psi_exact(x, y + 1)


def test_psi_errors():
    with pytest.raises(ParameterError):
        psi_exact(0, 3)
    with pytest.raises(ParameterError):
        psi_exact(10, 1)
    with pytest.raises(CapacityError):
        psi_exact(10**10 + 1, 3)


def test_rankin_bound():
    v = psi_rankin_bound(1e8, 1e3)
    mpmath.mp.dps = 40
    y = mpmath.mpf(1000)
    ref = mpmath.mpf(10) ** 8 * mpmath.exp(-(mpmath.log(mpmath.log(mpmath.log(y))) / mpmath.log(y))
                                          * mpmath.log(mpmath.mpf(10) ** 8) + mpmath.log(mpmath.log(y)))
    assert v == pytest.approx(float(ref), rel=1e-12)
    assert 0 < v < math.inf
    vals = [psi_rankin_bound(x, 100) for x in (10, 100, 1000, 10**4)]
    assert vals == sorted(vals)
    with pytest.raises(ParameterError):
        psi_rankin_bound(100, 15)


def test_smooth_survivor_bound():
    assert smooth_survivor_bound(100, 5, 1) == pytest.approx(math.log(100) ** 2 * 34)
    assert smooth_survivor_bound(100, 5, 0) == pytest.approx(math.log(100) * 34)
    assert smooth_survivor_bound(100, 5, 3) > smooth_survivor_bound(100, 5, 2)


def test_survivor_estimate_degenerate():
    ps = bytearray_sieve(1000)
    est = survivor_estimate(100, 1000)
    assert est.n0_exact == sum(1 for p in ps if 50 < p <= 1000)


def test_survivor_estimate_with_tuple():
    # enumeration oracle: loops over exponents and primes
    P = bytearray_sieve(120)
    s = set()
    for a1 in range(4):
        for a2 in range(4):
            d = 5**a1 * 7**a2
            s.update(p * d for p in P if 15 < p * d <= 120)
    assert len(s) == 41
    assert survivor_estimate(30, 120, (5, 7)).n0_exact == 41
    assert survivor_estimate(30, 120, (7, 5)).n0_exact == 41
    assert survivor_forms(30, 120, (5, 7)) == s


def test_survivor_estimate_pnt_within_factor_two():
    for U, H, q in [(10**5, (5, 7), None), (2 * 10**5, (11,), None), (10**5, (13, 17), 3)]:
        est = survivor_estimate(100, U, H, q, w=20)
        assert est.n0_exact / 2 < est.n0_pnt < 2 * est.n0_exact
        assert est.smooth_term > 0
