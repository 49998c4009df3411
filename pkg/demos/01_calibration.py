"""Walk through the Frobenius structure, the calibration S(z) and the R-matrix.

Run with ``python demos/01_calibration.py``.
"""

from __future__ import annotations

from fractions import Fraction

from catalan_frobenius.calibration import r_matrix, s_matrix, symplectic_defect_R
from catalan_frobenius.frobenius import SPECIAL_POINT, intersection_form, make_point, multiply
from catalan_frobenius.periods import ode_residual, period_special
from catalan_frobenius.scalars import ExactScalar

# The product at a point (t1, t2): e2 * e2 = e1 / t2.
p = make_point(Fraction(1, 3), 16)
e2 = (ExactScalar(0), ExactScalar(1))
print("e2*e2 at", p, "=", [str(c) for c in multiply(p, e2, e2)])
print("canonical coordinates:", p.u1, p.u2)
print("intersection form:", intersection_form(p).to_strings())

# S(z) with the calibration parameter kept symbolic.
S = s_matrix(SPECIAL_POINT, K=5)
for k in range(1, 6):
    print(f"S_{k} =", S[k].to_strings())

# R(z) in the normalized canonical frame and its symplectic defect.
R = r_matrix(SPECIAL_POINT, K=4)
print("R_1 =", R[1].to_strings())
print("symplectic defect vanishes:", all(m.is_zero() for m in symplectic_defect_R(R)))

# Period vectors at λ = ∞ solve the period system exactly.
I = period_special(level=1, order=6, label=(1, 0))
print("I^(1) first component, top terms:", sorted(I[0].terms.items(), reverse=True)[:3])
print("period system residual is zero:", all(not c.terms for c in ode_residual(I)))
