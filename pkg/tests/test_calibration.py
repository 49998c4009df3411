from __future__ import annotations

import time
from fractions import Fraction

import pytest

from catalan_frobenius.calibration import (
    hamiltonian_density,
    c_prefactor_consistency,
    r_matrix,
    r_matrix_closed,
    r_matrix_recursive,
    r_recursion_residual,
    s_matrix,
    s_matrix_residual,
    s_matrix_residue_form,
    s_special_closed_form,
    symplectic_defect_R,
    symplectic_defect_S,
)
from catalan_frobenius.frobenius import SPECIAL_POINT, make_point
from catalan_frobenius.linalg import Matrix
from catalan_frobenius.scalars import ExactScalar

PSI = ExactScalar.psi()
F = Fraction

# literal values at the point (0, 1), symbolic ψ
LITERAL_S = {
    1: Matrix([[0, PSI], [1, 0]]),
    2: Matrix([[1, 0], [0, PSI - 1]]),
    3: Matrix([[0, PSI - 2], [F(1, 2), 0]]),
    4: Matrix([[F(1, 4), 0], [0, PSI * F(1, 2) - F(5, 4)]]),
    5: Matrix([[0, PSI * F(1, 4) - F(3, 4)], [F(1, 12), 0]]),
}

POINTS = [SPECIAL_POINT, make_point(1, 16), make_point(F(-1, 3), F(1, 16))]


@pytest.mark.parametrize("k", sorted(LITERAL_S))
def test_s_literal_values(k):
    assert s_matrix(K=5)[k] == LITERAL_S[k]


def test_s_closed_form_at_special_point():
    table = s_matrix(K=8)
    for k in range(9):
        assert table[k] == s_special_closed_form(k)


@pytest.mark.parametrize("p", POINTS, ids=str)
def test_s_recursion_equals_residue_form(p):
    start = time.perf_counter()
    rec = s_matrix(p, K=8)
    res = s_matrix_residue_form(p, K=8)
    assert time.perf_counter() - start < 1.0
    assert list(rec.matrices) == list(res.matrices)
    assert all(m.is_zero() for m in s_matrix_residual(rec))


@pytest.mark.parametrize("p", POINTS, ids=str)
def test_s_symplectic(p):
    assert all(m.is_zero() for m in symplectic_defect_S(s_matrix(p, K=8)))


def test_s_numeric_psi_is_specialisation():
    sym = s_matrix(K=6)
    num = s_matrix(K=6, psi=F(3, 7))
    for a, b in zip(sym.matrices, num.matrices):
        assert a.map(lambda x: x.subs(psi=F(3, 7))) == b


@pytest.mark.parametrize("p", POINTS, ids=str)
def test_r_closed_equals_recursion(p):
    start = time.perf_counter()
    rec = r_matrix_recursive(p, 8)
    closed = [r_matrix_closed(p, k) for k in range(9)]
    assert time.perf_counter() - start < 1.0
    assert closed == rec


@pytest.mark.parametrize("p", POINTS, ids=str)
def test_r_symplectic_and_recursion(p):
    table = r_matrix(p, 8)
    assert all(m.is_zero() for m in symplectic_defect_R(table))
    assert all(m.is_zero() for m in r_recursion_residual(table))


def test_r_first_coefficient_at_special_point():
    # u2 − u1 = −4, (1/2)_0 (1/2)_1 / 1! = 1/2
    i = ExactScalar.i()
    assert r_matrix_closed(SPECIAL_POINT, 1) == Matrix([[F(-1, 16), i * F(-1, 8)], [i * F(-1, 8), F(1, 16)]])


def test_mutated_r_breaks_symplecticity():
    table = r_matrix(SPECIAL_POINT, 4)
    bad = list(table.matrices)
    bad[2] = bad[2] + Matrix([[F(1, 1000), 0], [0, 0]])
    mutated = type(table)(tuple(bad), table.point)
    assert not all(m.is_zero() for m in symplectic_defect_R(mutated))


def test_c_prefactor_log_coefficient():
    out = c_prefactor_consistency(make_point(1, 16))
    assert out["stated"] == F(-1, 16)
    assert out["integrated"] == F(-1, 8)
    assert out["residual"] == F(1, 16)


def test_hamiltonian_densities_low_orders():
    h10 = hamiltonian_density(1, 0)
    assert str(hamiltonian_density(1, -1)) == "(1)*t2"
    assert str(hamiltonian_density(2, -1)) == "(1)*t1"
    assert str(h10) == "(1)*t1*t2"


@pytest.mark.parametrize("alpha", [1, 2])
def test_hamiltonian_densities_descend_under_d_t1(alpha):
    for p in range(0, 6):
        assert str(hamiltonian_density(alpha, p).derivative("t1")) == str(hamiltonian_density(alpha, p - 1))
