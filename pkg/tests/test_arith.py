import random
from fractions import Fraction as F

import pytest

from padicdiff.arith import (
    BOTTOM,
    Interval,
    LogMag,
    Prime,
    digit_sum,
    factorial_log_abs,
    log_abs,
    padic_valuation,
)
from padicdiff.errors import InputError


def test_log_abs_examples():
    assert log_abs(0, 2) is BOTTOM or log_abs(0, 2).is_bottom
    assert log_abs(12, 2) == LogMag.finite(-2)  # |12|_2 = 1/4
    assert log_abs(F(5, 6), 3) == LogMag.finite(1)  # |5/6|_3 = 3


def test_log_pi():
    assert Prime(2).log_pi == F(-1)
    assert Prime(3).log_pi == F(-1, 2)
    assert Prime(5).log_pi == F(-1, 4)


def test_prime_validation():
    with pytest.raises(InputError):
        Prime(4)
    with pytest.raises(InputError):
        Prime(1)
    Prime(97)


def test_valuation_of_zero_rejected():
    with pytest.raises(InputError):
        padic_valuation(0, 2)


def test_bottom_absorbs_and_orders():
    x = LogMag.finite(F(3, 2))
    assert (BOTTOM + x).is_bottom
    assert (x + BOTTOM).is_bottom
    assert BOTTOM < x
    assert max(BOTTOM, x) == x
    assert max(BOTTOM, BOTTOM).is_bottom
    # identity of the product is log 1 = 0
    assert x + LogMag.finite(0) == x


def test_product_commutative_associative():
    rng = random.Random(9)
    vals = [BOTTOM] + [LogMag.finite(F(rng.randint(-9, 9), rng.randint(1, 9))) for _ in range(9)]
    for a in vals:
        for b in vals:
            assert a + b == b + a
            for c in vals:
                assert (a + b) + c == a + (b + c)


def test_logmag_sub_by_zero():
    with pytest.raises(ZeroDivisionError):
        LogMag.finite(1) - BOTTOM


def test_product_rule_exact():
    rng = random.Random(7)
    for _ in range(300):
        p = rng.choice([2, 3, 5, 7])
        a = F(rng.randint(-500, 500), rng.randint(1, 500))
        b = F(rng.randint(-500, 500), rng.randint(1, 500))
        assert log_abs(a * b, p) == log_abs(a, p) + log_abs(b, p)


def test_ultrametric_inequality():
    rng = random.Random(8)
    for _ in range(300):
        p = rng.choice([2, 3, 5])
        a = F(rng.randint(-500, 500), rng.randint(1, 500))
        b = F(rng.randint(-500, 500), rng.randint(1, 500))
        na, nb, ns = log_abs(a, p), log_abs(b, p), log_abs(a + b, p)
        assert ns <= max(na, nb)
        if na != nb:
            assert ns == max(na, nb)


def test_factorial_log_abs_matches_direct():
    import math

    for p in (2, 3, 5):
        for n in range(0, 60):
            if n == 0:
                assert factorial_log_abs(0, p) == 0
                continue
            direct = -padic_valuation(math.factorial(n), p) if math.factorial(n) % p == 0 else 0
            # padic_valuation of n! directly
            v = 0
            q = p
            while q <= n:
                v += n // q
                q *= p
            assert factorial_log_abs(n, p) == F(-v)
            assert digit_sum(n, p) == n - v * (p - 1)


def test_interval_basics():
    iv = Interval(F(-1), F(2))
    assert iv.contains(0)
    assert not iv.contains(-1)
    assert iv.contains(-1, closed=True)
    assert iv.midpoint == F(1, 2)
    grid = iv.interior_grid(5)
    assert len(grid) == 5
    assert all(iv.contains(r) for r in grid)
    assert grid == sorted(grid)


def test_interval_degenerate_rejected():
    with pytest.raises(InputError):
        Interval(1, 1)
    with pytest.raises(InputError):
        Interval(2, 1)


def test_interval_remove_points():
    iv = Interval(0, 4)
    pieces = iv.remove_points([F(1), F(3), F(9)])
    assert [(p.lo, p.hi) for p in pieces] == [(0, 1), (1, 3), (3, 4)]
    assert iv.remove_points([]) == [iv]


def test_interval_scaled():
    iv = Interval(-2, 4).scaled(F(1, 2))
    assert (iv.lo, iv.hi) == (-1, 2)
