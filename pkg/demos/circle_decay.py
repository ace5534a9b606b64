"""
Slow convergence on the circle
==============================

For ``A = z - 1`` over Z the characteristic sequence is known in closed
form, ``c_p = C(2p, p) / 4**p`` for ``K**2 = 4``.  It tends to the kernel
dimension 0 only like ``p**(-1/2)``, which is the Novikov-Shubin
exponent at work: ``alpha = 1`` for a simple zero on the unit circle.
"""
import math

from l2lab import characteristic_sequence, kernel_dimension, ns_beta, oracles
from l2lab.fixtures import zpoly

A = zpoly([-1, 1])
seq = characteristic_sequence(A, K=4, p_max=500)
for p in (1, 10, 100, 500):
    exact = math.comb(2 * p, p) / 4 ** p
    print(f"p = {p:3d}: c_p = {float(seq.c(p)):.6f}   closed form {exact:.6f}")

# %%
# Raw upper bounds never reach 0, but Z is torsion free so kernel
# dimensions are integers; c_p < 1 already pins the value to 0.
est = kernel_dimension(A, report=seq, snap_denominator=1)
print("upper bound", est.upper_bound, "snapped", est.snapped, est.provenance)

# %%
# Decay exponents from a log-log fit, next to the torus oracle's alpha.
for name, B in [("z - 1", A), ("(z - 1)^2", zpoly([1, -2, 1]))]:
    s = characteristic_sequence(B.to_float(), p_max=4000)
    beta = ns_beta(s, 0, (400, 4000)).beta_hat
    alpha, _ = oracles.torus_novikov_shubin(B)
    print(f"{name:10s} beta = {beta:.3f}   alpha (torus oracle) = {alpha.value:.3f}")
