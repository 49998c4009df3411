"""Gluing polygons by brute force and reading the same numbers off log 𝒟.

Run with ``python demos/02_maps_and_potential.py``.
"""

from __future__ import annotations

from collections import Counter
from math import factorial, prod

from catalan_frobenius.catalan import count_maps_bruteforce, genus_distribution
from catalan_frobenius.givental import DescendentPotential

# One polygon with 2m sides: planar gluings are counted by Catalan numbers.
print("planar one-face counts:", [count_maps_bruteforce((0, [2 * m])) for m in range(1, 7)])

# The full genus distribution of an octagon.
print("octagon by genus:", genus_distribution((8,)))

# Coefficients of ε^{2g−2} t^1_{k_1} … t^1_{k_n} in log 𝒟 at ψ = 0,
# weighted by the symmetry factor and ∏ (k_i + 1)!, against the map counts.
D = DescendentPotential(genus_max=1, chi_max=2, psi=0)
for g, ks in [(0, (1,)), (0, (0, 2)), (0, (1, 1, 1)), (1, (3,)), (1, (5,)), (1, (1, 3)), (1, (2, 4))]:
    coef = D.coefficient(g, [(1, k) for k in ks]).to_fraction()
    weight = prod(factorial(c) for c in Counter(ks).values()) * prod(factorial(k + 1) for k in ks)
    maps = count_maps_bruteforce((g, [k + 1 for k in ks]))
    print(f"g={g} k={ks}: potential {coef * weight}, maps {maps}")
