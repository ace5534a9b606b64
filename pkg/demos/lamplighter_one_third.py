"""
The lamplighter kernel of dimension 1/3
=======================================

The Markov operator of the lamplighter group for the generators
``{e0*t, t}`` has a kernel of von Neumann dimension 1/3, a value with
denominator 3 although the group has no elements of order 3.  Two
independent routes reach it here: the exact characteristic sequence
(upper bounds) and kernel counting on finite quotients.
"""

from l2lab import characteristic_sequence
from l2lab.approximation import tower
from l2lab.fixtures import lamplighter_markov

u = lamplighter_markov()
print(u.entries[0][0])

# %%
# The operator norm of u is at most 1, so K = 1 is admissible.  Values are
# exact rationals; every one of them is an upper bound for dim ker.
seq = characteristic_sequence(u, K=1, p_max=14)
for p, c in enumerate(seq.values, start=1):
    print(f"c_{p:<2d} = {str(c):>24s}  ~ {float(c):.5f}")
print("monotone:", seq.monotone)

# %%
# The quotients Z/2 wr Z/N have order N*2^N.  Normalised kernel dimensions
# hover around 1/3 from N = 3 on.
for N, v in tower(u, range(1, 11)):
    print(f"N = {N:2d}: {str(v):>10s} ~ {float(v):.5f}")
