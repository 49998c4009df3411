from __future__ import annotations

from fractions import Fraction

import pytest

from catalan_frobenius.givental import DescendentPotential
from catalan_frobenius.hirota import HirotaError, HqeInstance, hqe_integrand, residues_by_n, verify_hqe


def potential_for(inst: HqeInstance) -> DescendentPotential:
    return DescendentPotential(inst.genus_max, inst.chi_max, inst.psi)


@pytest.mark.parametrize("k", [-1, 0, 1])
def test_hqe_small_window_symbolic_psi(k):
    inst = HqeInstance(k=k, n_max=2, degree_max=2, eps_max=2, psi=None)
    report = verify_hqe(inst, potential_for(inst))
    assert report.ok, report.nonzero[:3]
    assert report.checked > 0
    assert set(report.per_n) >= {0, 1, 2}


def test_hqe_numeric_psi():
    inst = HqeInstance(k=1, n_max=1, degree_max=2, eps_max=2, psi=Fraction(3, 2))
    assert verify_hqe(inst, potential_for(inst)).ok


# linear terms of log 𝒟 cancel in the normalized integrand (e^{linear}τ solves the same
# equations), so the perturbations are at least quadratic
@pytest.mark.parametrize("slots", [[(1, 0), (1, 0)], [(2, 0), (1, 1)], [(1, 0), (2, 0), (2, 0)]])
def test_hqe_detects_perturbation(slots):
    inst = HqeInstance(k=0, n_max=2, degree_max=2, eps_max=2, psi=None)
    D = potential_for(inst)
    genus = 1 if len(slots) <= 2 else 0
    D.perturb(genus, slots, Fraction(1, 5))
    report = verify_hqe(inst, D)
    assert not report.ok
    with pytest.raises(HirotaError):
        verify_hqe(inst, D, strict=True)


def test_trivial_tau_is_not_a_solution():
    inst = HqeInstance(k=1, n_max=1, degree_max=1, eps_max=1, psi=0)
    residues = residues_by_n(hqe_integrand(inst, None), inst.n_max)
    assert any(not r.is_zero() for r in residues.values())
