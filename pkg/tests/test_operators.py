from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from catalan_frobenius.operators import (
    DifferenceOperator,
    OperatorError,
    PseudoDiffOperator,
    bernoulli,
    falling_binomial,
    inverse_difference_derivative,
    shift,
)
from catalan_frobenius.series import Grading, SeriesRing

RING = SeriesRing(["eps", "X", "x", "lam"], [
    Grading("weight", {"eps": 1, "X": 1, "x": 1}, 5),
])
LOW = -4

coeff = st.fractions(min_value=-3, max_value=3, max_denominator=3)
poly = st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), coeff), max_size=3).map(
    lambda ts: RING.from_terms(({"X": a, "x": b}, c) for a, b, c in ts))


def operators(cls, powers=range(-2, 3)):
    return st.dictionaries(st.sampled_from(list(powers)), poly, max_size=3).map(
        lambda d: cls(RING, d, LOW, float("inf")))


@given(operators(PseudoDiffOperator), operators(PseudoDiffOperator), operators(PseudoDiffOperator))
def test_pseudo_differential_associativity(a, b, c):
    assert ((a * b) * c - a * (b * c)).is_zero()


@given(operators(DifferenceOperator), operators(DifferenceOperator), operators(DifferenceOperator))
def test_difference_associativity(a, b, c):
    assert ((a * b) * c - a * (b * c)).is_zero()


@given(operators(PseudoDiffOperator))
def test_projections_split(a):
    assert (a.plus() + a.minus() - a).is_zero()


@given(operators(PseudoDiffOperator, powers=range(-3, 3)))
def test_adjoint_is_an_involution(a):
    assert (a.adjoint().adjoint() - a).is_zero()


@given(operators(PseudoDiffOperator, powers=range(-3, 1)), poly)
def test_inverse_of_monic_operator(a, f):
    depth = 4
    A = PseudoDiffOperator.generator(RING, 1) + PseudoDiffOperator(RING, {k - 1: v for k, v in a.terms.items()})
    A = A.truncate(LOW, float("inf"))
    prod = A * A.inverse(depth)
    one = PseudoDiffOperator.generator(RING, 0)
    diff = prod - one
    assert diff.is_zero()
    assert diff.low >= LOW - 1 - depth


def test_leibniz_rule_for_d():
    X = RING.var("X")
    D = PseudoDiffOperator.generator(RING, 1)
    out = D * PseudoDiffOperator.scalar(X * X)
    eps = RING.var("eps")
    assert (out - PseudoDiffOperator(RING, {1: X * X, 0: eps * X * 2})).is_zero()


def test_inverse_d_on_function():
    # D^{-1} f = f D^{-1} − ε f' D^{-2} + ε² f'' D^{-3} − …
    X = RING.var("X")
    Dinv = PseudoDiffOperator(RING, {-1: RING.one()}, LOW, float("inf"))
    out = Dinv * PseudoDiffOperator.scalar(X ** 2)
    eps = RING.var("eps")
    expected = {-1: X ** 2, -2: -(eps * X * 2), -3: eps ** 2 * 2}
    assert all(out.coefficient(k) == v for k, v in expected.items())
    assert out.coefficient(-4).is_zero()


def test_shift_operator_action():
    x = RING.var("x")
    L = DifferenceOperator.generator(RING, 1)
    out = L * DifferenceOperator.scalar(x * x)
    assert out.coefficient(1) == shift(x * x, "x", 1)
    assert shift(x * x, "x", 1) == x * x + (RING.var("eps") * x) * 2 + RING.var("eps") ** 2


def test_inverse_difference_derivative():
    # (Λ − 1) g = ∂_x f for g = (Λ − 1)^{-1} ∂_x f
    x = RING.var("x")
    for f in (x ** 3, x ** 2 * RING.var("X"), x ** 4):
        g = inverse_difference_derivative(f, "x")
        assert shift(g, "x", 1) - g == f.derivative("x")


def test_coefficient_outside_exact_range():
    A = PseudoDiffOperator(RING, {0: RING.one()}, LOW, float("inf"))
    with pytest.raises(OperatorError):
        A.coefficient(LOW - 1)
    with pytest.raises(OperatorError):
        PseudoDiffOperator(RING, {}, 1, float("inf")).plus()


def test_numeric_helpers():
    assert [bernoulli(n) for n in range(5)] == [1, Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30)]
    assert falling_binomial(-1, 3) == -1
    assert falling_binomial(3, 2) == 3
    assert falling_binomial(2, 3) == 0
