from __future__ import annotations

from fractions import Fraction
from math import factorial, prod

from hypothesis import given, strategies as st

from catalan_frobenius.kdv import (
    dilaton_residual,
    dilaton_shift_check,
    double_factorial,
    intersection_number,
    partitions_for,
    string_residual,
)


def stable_tuples(max_genus: int = 2, max_n: int = 4):
    def build(g_n_seed):
        g, n, seed = g_n_seed
        dim = 3 * g - 3 + n
        parts = [0] * n
        # distribute dim over n slots deterministically from the seed
        for j in range(max(dim, 0)):
            parts[(seed >> j) % n if n else 0] += 1
        return g, tuple(parts)

    return st.tuples(st.integers(0, max_genus), st.integers(1, max_n), st.integers(0, 2 ** 16)).filter(
        lambda t: 2 * t[0] - 2 + t[1] > 0).map(build)


@given(stable_tuples())
def test_string_equation(case):
    g, a = case
    assert string_residual(g, a) == 0


@given(stable_tuples())
def test_dilaton_equation(case):
    g, a = case
    assert dilaton_residual(g, a) == 0


@given(stable_tuples(max_n=3))
def test_dilaton_shift(case):
    g, a = case
    assert dilaton_shift_check(g, a, 3)


@given(st.lists(st.integers(0, 5), min_size=3, max_size=7))
def test_genus_zero_multinomial(a):
    n = len(a)
    expected = Fraction(factorial(n - 3), prod(factorial(x) for x in a)) if sum(a) == n - 3 else 0
    assert intersection_number(0, a) == expected


def test_known_values():
    assert intersection_number(1, [1]) == Fraction(1, 24)
    assert intersection_number(2, [4]) == Fraction(1, 1152)
    assert intersection_number(2, [2, 3]) == Fraction(29, 5760)
    assert intersection_number(2, [2, 2, 2]) == Fraction(7, 240)
    assert intersection_number(3, [7]) == Fraction(1, 82944)


def test_dimension_mismatch_vanishes():
    assert intersection_number(1, [2]) == 0


def test_partitions_have_right_dimension():
    for g, n in [(0, 5), (1, 3), (2, 2)]:
        for a in partitions_for(g, n):
            assert sum(a) == 3 * g - 3 + n


def test_double_factorial():
    assert [double_factorial(k) for k in (-1, 0, 1, 5, 6)] == [1, 1, 1, 15, 48]
