from __future__ import annotations


import pytest

from catalan_frobenius.periods import (
    MonodromyElement,
    PeriodError,
    bilinear,
    generator_matrix,
    monodromy_apply,
    normalized_leading_vector,
    ode_residual,
    pencil_pairing,
    period_near_ui,
    period_special,
    puiseux_from_closed_form,
    puiseux_ode_residual,
    w_function,
)
from catalan_frobenius.frobenius import pairing
from catalan_frobenius.linalg import Matrix
from catalan_frobenius.scalars import ExactScalar

LEVELS = range(-2, 4)


@pytest.mark.parametrize("level", LEVELS)
def test_closed_and_explicit_expansions_agree(level):
    for label in [(1, 0), (0, 1), (2, -3)]:
        assert period_special(level, 8, label) == period_special(level, 8, label, representation="infty")


@pytest.mark.parametrize("level", LEVELS)
def test_expansions_solve_the_period_system(level):
    for label in [(1, 0), (0, 1)]:
        assert all(not c.terms for c in ode_residual(period_special(level, 8, label)))


def test_levels_are_derivatives():
    for level in range(-2, 3):
        assert period_special(level, 6).derivative() == period_special(level + 1, 6)


@pytest.mark.parametrize("i", [1, 2])
def test_puiseux_against_closed_form(i):
    assert period_near_ui(i, 0, 6).terms == puiseux_from_closed_form(i, 6).terms


@pytest.mark.parametrize("i", [1, 2])
@pytest.mark.parametrize("level", [-1, 0, 1, 2])
def test_puiseux_solves_the_system(i, level):
    assert puiseux_ode_residual(period_near_ui(i, level, 5)) == {}


def test_normalized_leading_vectors_are_orthonormal():
    for level in (-1, 0, 1, 2):
        vs = [normalized_leading_vector(i, level) for i in (1, 2)]
        for a in range(2):
            for b in range(2):
                assert pairing(vs[a], vs[b]) == ExactScalar(int(a == b))
        assert vs == [normalized_leading_vector(i, 0) for i in (1, 2)]


def test_monodromy_generators_are_reflections():
    for i in (1, 2):
        g = generator_matrix(i)
        assert g * g == Matrix.identity()
        assert g.det2() == ExactScalar(-1)
    word = MonodromyElement.parse("12")
    a = (ExactScalar(3), ExactScalar(5))
    assert bilinear(monodromy_apply(word, a), monodromy_apply(word, a)) == bilinear(a, a)
    with pytest.raises(PeriodError):
        MonodromyElement((3,))


def test_pencil_pairing_is_constant():
    for a, b in [((1, 0), (0, 1)), ((2, 1), (1, -1)), ((1, 1), (1, 1))]:
        p = pencil_pairing(a, b)
        c = bilinear(a, b)
        assert p.expand_at_infinity(6).terms == ({(0, 0): c} if c else {})


def test_w_function_expansion():
    W = w_function((1, 0), (1, 0))
    expansion = W.expand_at_infinity(7)
    # λ/(λ² − 4) = Σ 4^k λ^{-2k-1}
    assert expansion.terms == {(-2 * k - 1, 0): ExactScalar(4 ** k) for k in range(4)}
