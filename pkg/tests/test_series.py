from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from catalan_frobenius.series import (
    CapProfile,
    Grading,
    LambdaObject,
    SeriesError,
    SeriesRing,
    lambda_residue_at_infinity,
    polynomial_ring,
    series_exp,
    series_inverse,
    series_log,
    series_log1p,
)

VARS = ("eps", "a", "b")


def ring(cap: int = 5, eps_cap: int = 3) -> SeriesRing:
    return SeriesRing(VARS, [Grading("degree", {v: 1 for v in VARS}, cap), Grading("eps", {"eps": 1}, eps_cap)])


BIG = ring()


coeff = st.fractions(min_value=-5, max_value=5, max_denominator=6)
mono = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))


def series_strategy(constant: bool):
    terms = st.lists(st.tuples(mono, coeff), max_size=6)

    def build(ts):
        s = BIG.from_terms((dict(zip(VARS, e)), c) for e, c in ts if constant or any(e))
        return s if constant else s - s.constant_term()

    return terms.map(build)


nilpotent = series_strategy(constant=False)
general = series_strategy(constant=True)


@given(nilpotent)
def test_exp_log_inverse_pair(s):
    assert series_log1p(series_exp(s) - 1) == s
    assert series_exp(series_log1p(s)) - 1 == s


@given(nilpotent)
def test_log_of_unit(s):
    assert series_log(series_exp(s)) == s


@given(nilpotent, nilpotent)
def test_exp_is_multiplicative(s, t):
    assert series_exp(s + t) == series_exp(s) * series_exp(t)


@given(nilpotent, coeff.filter(bool))
def test_inverse_of_unit(s, c):
    u = s + c
    assert series_inverse(u) * u == u.ring.one()


@given(general, general, general)
def test_ring_axioms(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r


@given(general, general, st.integers(0, 4))
def test_truncation_coherence_product(p, q, cap):
    small = ring(cap=cap, eps_cap=2)
    assert (p * q).restrict(small) == p.restrict(small) * q.restrict(small)


@given(nilpotent, st.integers(0, 4))
def test_truncation_coherence_exp(s, cap):
    small = ring(cap=cap, eps_cap=2)
    assert series_exp(s).restrict(small) == series_exp(s.restrict(small))


@given(general, general)
def test_leibniz(p, q):
    # ∂ lowers degree by one, so only degrees below the cap are determined
    below = ring(cap=4)
    lhs = (p * q).derivative("a").restrict(below)
    assert lhs == (p.derivative("a") * q + p * q.derivative("a")).restrict(below)


def test_caps_drop_monomials():
    R = polynomial_ring(["a"], 2)
    a = R.var("a")
    assert (a ** 3).is_zero()
    assert (a * a).coefficient({"a": 2}) == 1


def test_exp_requires_nilpotent_argument():
    R = polynomial_ring(["a"], 2)
    with pytest.raises(SeriesError):
        series_exp(R.one() + R.var("a"))


def test_unknown_variable_rejected():
    with pytest.raises(SeriesError):
        polynomial_ring(["a"], 2).var("z")


def test_cap_profile_validation():
    with pytest.raises(SeriesError):
        CapProfile(eps_window=(2, -2))
    g = CapProfile(degree_max=3, eps_window=(-2, 2)).to_gradings(["x"])
    assert [x.cap for x in g] == [3, 2]


def test_lambda_object_calculus():
    f = LambdaObject({(2, 0): Fraction(1), (-1, 0): Fraction(3), (0, 1): Fraction(1)})
    assert f.integral().derivative() == f
    assert lambda_residue_at_infinity(LambdaObject.monomial(-1, 5)) == -5
    with pytest.raises(SeriesError):
        LambdaObject.monomial(0, 1, p=1) * LambdaObject.monomial(0, 1, p=1)
