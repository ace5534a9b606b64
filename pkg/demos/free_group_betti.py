"""
First L2-Betti number of a wedge of circles
===========================================

The universal cover of a wedge of ``k`` circles is a tree; its cellular
complex over the free group has ``b_1 = k - 1`` and ``b_0 = 0``.  The
free group has a spectral gap, so the sequence converges geometrically
even though supports grow exponentially; the Laplacian ``2k - sigma_1``
is radial, which keeps the exact computation cheap.
"""
from l2lab import l2_betti_numbers
from l2lab.fixtures import wedge_of_circles

for k in (2, 3, 4):
    rep = l2_betti_numbers(wedge_of_circles(k), p_max=60)
    print(f"k = {k}: b_0 ~ {rep.betti[0]:.6f}, b_1 ~ {rep.betti[1]:.6f}, "
          f"Euler check {rep.euler.alternating_betti:+.6f} vs chi = {rep.euler.chi}")
