from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from catalan_frobenius.frobenius import (
    FrobeniusError,
    SPECIAL_POINT,
    euler_vector,
    idempotents,
    intersection_form,
    intersection_form_formula,
    make_point,
    multiply,
    pairing,
    third_derivatives,
)
from catalan_frobenius.linalg import Matrix
from catalan_frobenius.scalars import ExactScalar

small = st.fractions(min_value=-4, max_value=4, max_denominator=5)
positive = st.fractions(min_value=Fraction(1, 5), max_value=3, max_denominator=5)


def points():
    # t2 = r^4 keeps the quarter root rational
    return st.tuples(small, positive).filter(lambda p: 4 * p[1] ** 4 != p[0] ** 2).map(
        lambda p: make_point(p[0], p[1] ** 4))


vectors = st.tuples(small, small).map(lambda v: (ExactScalar(v[0]), ExactScalar(v[1])))


@given(points(), vectors, vectors, vectors)
def test_wdvv_associativity(p, x, y, z):
    assert multiply(p, multiply(p, x, y), z) == multiply(p, x, multiply(p, y, z))


@given(points(), vectors, vectors, vectors)
def test_pairing_is_invariant(p, x, y, z):
    assert pairing(multiply(p, x, y), z) == pairing(x, multiply(p, y, z))


@given(points())
def test_third_derivatives_symmetric(p):
    F = third_derivatives(p)
    for a in range(2):
        for b in range(2):
            for c in range(2):
                assert F[a][b][c] == F[b][a][c] == F[a][c][b]


@given(points())
def test_intersection_form_matches_closed_expression(p):
    assert intersection_form(p) == intersection_form_formula(p)


@given(points())
def test_canonical_idempotents(p):
    e1, e2 = idempotents(p)
    zero = (ExactScalar(0), ExactScalar(0))
    assert multiply(p, e1, e1) == e1
    assert multiply(p, e2, e2) == e2
    assert multiply(p, e1, e2) == zero
    # E = u1 e1 + u2 e2
    E = euler_vector(p)
    assert tuple(p.u1 * a + p.u2 * b for a, b in zip(e1, e2)) == E


@given(points())
def test_frame_diagonalises_euler_product(p):
    fr = p.frame
    assert fr.psi_inv * fr.psi == Matrix.identity()
    assert fr.psi * p.euler_matrix * fr.psi_inv == fr.U


def test_special_point():
    assert (SPECIAL_POINT.u1, SPECIAL_POINT.u2) == (ExactScalar(2), ExactScalar(-2))


@pytest.mark.parametrize("t1,t2", [(2, 1), (0, 0), (4, 4)])
def test_non_semisimple_points_rejected(t1, t2):
    with pytest.raises(FrobeniusError):
        make_point(t1, t2)
