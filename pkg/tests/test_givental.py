from __future__ import annotations

from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, strategies as st

from catalan_frobenius.cache import CACHE_ENV, load_potential
from catalan_frobenius.givental import (
    DescendentPotential,
    GiventalError,
    LinearHamiltonian,
    apply_quantized,
    flat_ancestor,
    flat_ancestor_via_canonical,
    omega,
    two_point_series_explicit,
    unstable_01,
    unstable_02,
)
from catalan_frobenius.scalars import ExactScalar
from catalan_frobenius.series import Grading, SeriesRing

Q_NAMES = [f"q{i}_{l}" for i in (1, 2) for l in range(4)]
Q_RING = SeriesRing(["eps"] + Q_NAMES, [Grading("degree", {n: 1 for n in Q_NAMES}, 8)])

small = st.fractions(min_value=-3, max_value=3, max_denominator=3)
hamiltonians = st.dictionaries(st.integers(-3, 2), st.tuples(small, small), max_size=4).map(LinearHamiltonian)
monomials = st.lists(st.tuples(st.sampled_from(Q_NAMES), st.integers(0, 2)), max_size=3)
test_series = st.lists(st.tuples(monomials, small), min_size=1, max_size=4).map(
    lambda ts: Q_RING.from_terms(({k: e for k, e in m}, c) for m, c in ts))


@given(hamiltonians, hamiltonians, test_series)
def test_quantization_commutator(f, g, s):
    lhs = apply_quantized(f, apply_quantized(g, s)) - apply_quantized(g, apply_quantized(f, s))
    assert lhs == s.scale(omega(f, g))


@given(hamiltonians, hamiltonians)
def test_omega_is_antisymmetric(f, g):
    assert omega(f, g) == -omega(g, f)


def test_two_point_series():
    D = DescendentPotential(0, 0, psi=0)
    V = lambda a, b: D.quadratic_coefficient((1, a), (1, b)) if a >= 0 and b >= 0 else ExactScalar(0)
    for a in range(6):
        for b in range(6):
            if a + b == 0:
                continue
            assert V(a - 1, b) + V(a, b - 1) == ExactScalar(two_point_series_explicit(a, b))
            if a <= 4 and b <= 4:
                assert V(a, b) == unstable_02(a, b)


def test_one_point_unstable_coefficient():
    for a in range(8):
        expected = Fraction(0)
        if a % 2:
            m = (a - 1) // 2
            expected = Fraction(1, factorial(m + 1) * factorial(m + 2))
        assert unstable_01(a) == ExactScalar(expected)


def test_linear_coefficient_two_routes():
    D = DescendentPotential(1, 2, psi=None)
    for beta in (1, 2):
        for a in range(5):
            assert D.linear_coefficient(beta, a) == D.linear_coefficient_from_form(beta, a)


def test_symbolic_psi_enters_quadratic_part():
    D = DescendentPotential(0, 0, psi=None)
    assert D.coefficient(0, [(2, 0), (2, 0)]) == ExactScalar.psi() * Fraction(1, 2)
    assert DescendentPotential(0, 0, psi=Fraction(2)).coefficient(0, [(2, 0), (2, 0)]) == ExactScalar(1)


def test_genus_zero_three_point():
    D = DescendentPotential(1, 2, psi=0)
    assert D.coefficient(0, [(1, 0), (1, 0), (2, 0)]) == ExactScalar(Fraction(1, 2))


def test_canonical_and_flat_routes_agree():
    assert flat_ancestor(1, 2) == flat_ancestor_via_canonical(1, 2)


def test_truncation_coherence_of_ancestor():
    big = flat_ancestor(2, 3)
    small = flat_ancestor(1, 2)
    assert {k: v for k, v in big.items() if k[0] <= 1 and 2 * k[0] - 2 + len(k[1]) <= 2} == small


def test_coefficient_outside_caps_rejected():
    with pytest.raises(GiventalError):
        DescendentPotential(0, 1).coefficient(1, [(1, 1)])


def test_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    first = load_potential(1, 2, 0)
    assert list(tmp_path.iterdir())
    second = load_potential(1, 2, 0)
    assert first.flat == second.flat
    assert second.coefficient(1, [(1, 1)]) == first.coefficient(1, [(1, 1)])
