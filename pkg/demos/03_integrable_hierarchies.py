"""Hirota equations and the two Lax descriptions of the same tau function.

Run with ``python demos/03_integrable_hierarchies.py`` (well under a minute).
"""

from __future__ import annotations

from fractions import Fraction

from catalan_frobenius.givental import DescendentPotential
from catalan_frobenius.hirota import HqeInstance, verify_hqe
from catalan_frobenius.lax import lax_frame, verify_nls, verify_toda

# Residues of the bilinear equations vanish for symbolic ψ …
inst = HqeInstance(k=1, n_max=2, degree_max=2, eps_max=2, psi=None)
D = DescendentPotential(inst.genus_max, inst.chi_max, None)
report = verify_hqe(inst, D)
print(f"HQE k={inst.k}: {report.checked} coefficients checked, ok={report.ok}")

# … and stop vanishing once a single coefficient of log 𝒟 is changed.
D.perturb(1, [(1, 0), (1, 0)], Fraction(1, 5))
print("after perturbation ok =", verify_hqe(inst, D).ok)

# The Toda (difference) and NLS (pseudo-differential) pictures.
frame = lax_frame(weight_cap=3, depth=4, psi=None)
print("u =", frame.u)
for rep in (verify_toda(frame), verify_nls(frame)):
    for check in rep.checks:
        print(f"  {'ok ' if check.ok else 'BAD'} {check.name}")
