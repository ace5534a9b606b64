"""
Fuglede-Kadison determinants over Z
===================================

Over the integers the determinant of ``r_p`` is the Mahler measure of the
Laurent polynomial ``p``.  The characteristic-sequence partial sums
``S_L`` decrease to ``ln det``; the oracle computes the same number from
roots and, independently, from Jensen integration.
"""
import math

from l2lab import fk_log_det, oracles
from l2lab.fixtures import zpoly

for coeffs in ([-2, 1], [6, -5, 1], [1, 1, 1], [1, 0, -3, 0, 1]):
    A = zpoly(coeffs)
    p = A.entries[0][0]
    roots = oracles.mahler_log_det(p)
    jensen = oracles.jensen_log_measure(p)
    est = fk_log_det(A.to_float(), 0, 5000)
    print(f"{str(p):45s} roots {roots:.8f}  Jensen {jensen:.8f}  S_5000 {est.value:.8f}")

# %%
# Partial sums for z - 2: monotone decrease towards ln 2.
est = fk_log_det(zpoly([-2, 1]).to_float(), 0, 200)
for L in (1, 5, 20, 50, 200):
    print(f"S_{L:<3d} = {est.partial_sums[L - 1]:.8f}")
print(f"ln 2  = {math.log(2):.8f}")
