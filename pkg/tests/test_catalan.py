from __future__ import annotations

from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, strategies as st

from catalan_frobenius.catalan import (
    CatalanError,
    MapCountQuery,
    catalan_number,
    count_maps_bruteforce,
    count_maps_reference,
    genus_distribution,
    one_point_genus0,
    theorem_profiles,
    unrooted_weighted_count,
    verify_potential_against_maps,
    xi_identity_expected,
    xi_residue_identity,
)
from catalan_frobenius.givental import DescendentPotential
from catalan_frobenius.kdv import double_factorial


@pytest.mark.parametrize("m,expected", [(1, 1), (2, 2), (3, 5), (4, 14), (5, 42)])
def test_planar_one_face(m, expected):
    assert count_maps_bruteforce((0, [2 * m])) == expected == catalan_number(m)


@pytest.mark.parametrize("k", range(1, 13))
def test_one_polygon_total(k):
    total = sum(genus_distribution((k,)).values())
    assert total == (double_factorial(k - 1) if k % 2 == 0 else 0)


def test_known_higher_genus_counts():
    # one-face counts are Harer-Zagier numbers; two digons glue into a sphere in two ways
    assert count_maps_bruteforce((1, [4])) == 1
    assert count_maps_bruteforce((1, [6])) == 10
    assert count_maps_bruteforce((2, [8])) == 21
    assert count_maps_bruteforce((0, [1, 1])) == 1
    assert count_maps_bruteforce((0, [2, 2])) == 2


@pytest.mark.parametrize("profile", [(4,), (2, 2), (1, 3), (3, 3), (1, 1, 2), (2, 4)])
def test_vectorised_count_matches_reference(profile):
    for g in range(3):
        q = MapCountQuery(g, profile)
        assert count_maps_bruteforce(q) == count_maps_reference(q)


@given(st.lists(st.integers(1, 4), min_size=1, max_size=3))
def test_count_symmetric_in_polygons(profile):
    dist = genus_distribution(tuple(profile))
    assert dist == genus_distribution(tuple(reversed(profile)))


def test_unrooted_weight():
    assert unrooted_weighted_count(MapCountQuery(0, (4,))) == Fraction(2, 4)


def test_bound_and_validation():
    with pytest.raises(CatalanError):
        count_maps_bruteforce((0, [20]))
    with pytest.raises(CatalanError):
        MapCountQuery(0, (0,))
    with pytest.raises(CatalanError):
        MapCountQuery(-1, (2,))


@pytest.mark.parametrize("alpha", [1, 2])
def test_xi_residue_identity(alpha):
    for k in range(9):
        for a in range(k + 4):
            assert xi_residue_identity(alpha, k, a) == xi_identity_expected(alpha, k, a)
            if a > k:
                assert xi_residue_identity(alpha, k, a) == 0


def test_one_point_closed_form_against_maps():
    D = DescendentPotential(0, 0, psi=0)
    for a in range(10):
        coef = D.coefficient(0, [(1, a)]).to_fraction()
        if a % 2:
            assert coef == one_point_genus0((a - 1) // 2)
        else:
            assert coef == 0
        if a + 1 <= 14:
            assert coef * factorial(a + 1) == count_maps_bruteforce((0, [a + 1]))


def test_theorem_small_window():
    report = verify_potential_against_maps(genus_max=1, n_max=2, k_max=4, chi_max=2)
    assert report.ok
    assert len(report.comparisons) == len(theorem_profiles(1, 2, 4, 2))


def test_theorem_detects_perturbation():
    D = DescendentPotential(1, 2, psi=0)
    D.perturb(1, [(1, 1), (1, 2)], Fraction(1, 7))
    report = verify_potential_against_maps(genus_max=1, n_max=2, k_max=4, chi_max=2, potential=D)
    assert not report.ok
    assert [r["k"] for r in report.mismatches] == [[1, 2]]
