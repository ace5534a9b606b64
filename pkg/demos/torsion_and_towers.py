"""
Torsion, Laplacians and finite quotients
========================================

L2-torsion of an acyclic complex, computed from the differentials and
again from the Laplacians; then the Approximation property on Z^2, where
normalised Betti numbers of the finite tori ``(Z/k)^2`` shrink to the
L2-Betti numbers of the plane, all zero.
"""
import math
from fractions import Fraction

from l2lab import l2_torsion
from l2lab.approximation import tower
from l2lab.fixtures import circle_complex, scaled_circle_complex, torus_complex

for name, C in [("circle", circle_complex()), ("z - 2", scaled_circle_complex(2)),
                ("z - 1/3", scaled_circle_complex(Fraction(1, 3)))]:
    rep = l2_torsion(C)
    print(f"{name:8s} rho = {rep.differential_route:+.10f} (Laplacians {rep.laplacian_route:+.10f})")
print("ln 2 =", math.log(2))

# %%
for k, betti in tower(torus_complex(), [1, 2, 4, 8, 16]):
    print(f"k = {k:2d}:", [str(b) for b in betti])
