"""
Powers of a normal-form matrix
==============================

A normal-form matrix is fixed by its first column, so its powers can be
read off N scalar sequences instead of repeated dense products.
"""

import numpy as np

from pwlorbit import GammaState, make_normal_matrix, power, power_bruteforce

# tau = 2, delta = 1: a double eigenvalue at 1
m = make_normal_matrix(2, [2.0, 1.0])
print(m.materialize())
print(power(m, 4))

# the same result through n - 1 dense products
print(power_bruteforce(m.materialize(), 4))

# a 5x5 example; the state keeps every sequence term, so all powers up to 12
# come from one pass
m5 = make_normal_matrix(5, [0.4, -0.3, 0.2, 0.1, -0.05])
state = GammaState(m5).extend(12)
for n in (1, 6, 12):
    err = np.max(np.abs(state.power(n) - power_bruteforce(m5.materialize(), n)))
    print(f"n={n:2d}  max difference to dense products {err:.1e}")

# consecutive powers share columns: column j of M^n is column j+1 of M^(n+1)
a, b = state.power(6), state.power(7)
print("shifted columns identical:", np.array_equal(a[:, :-1], b[:, 1:]))

# the geometric sum I + M + ... + M^(k-1) comes from the same table
phi = state.geometric_sum(8)
eye = np.eye(5)
print("phi (I - M) = I - M^8:", np.allclose(phi @ (eye - m5.materialize()), eye - state.power(8)))
