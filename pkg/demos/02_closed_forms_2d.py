"""
Two-dimensional closed forms
============================

For N = 2 the powers are described by a single scalar sequence a_n with
a_{n+1} = tau a_n - delta a_{n-1}. Three ways of evaluating it are compared,
and the resulting matrix and geometric-sum formulas are checked against the
general recurrence.
"""

from pwlorbit import (
    EigenvalueOneError,
    a_binomial,
    a_eigen,
    a_recurrence,
    geometric_sum,
    make_normal_matrix,
    phi_2d_closed,
    power,
    power_2d_closed,
)
from pwlorbit.gamma_power import eigenvalues_2d

tau, delta = 1.3, 0.6
l1, l2 = eigenvalues_2d(tau, delta)
print(f"eigenvalues {l1:.6f} and {l2:.6f}")

print(" n    recurrence          binomial            eigenvalues")
for n in (1, 2, 5, 10, 20):
    print(f"{n:2d}  {a_recurrence(tau, delta, n):18.12g}  {a_binomial(tau, delta, n):18.12g}  {a_eigen(l1, l2, n):18.12g}")

m = make_normal_matrix(2, [tau, delta])
print(power_2d_closed(tau, delta, 7))
print(power(m, 7))

print(phi_2d_closed(tau, delta, 7))
print(geometric_sum(m, 7))

# 1 - tau + delta = 0 puts an eigenvalue at 1: the closed form has a zero
# denominator, while summing the stored powers still works
try:
    phi_2d_closed(1.5, 0.5, 4)
except EigenvalueOneError as exc:
    print("closed form refused:", exc)
print(geometric_sum(make_normal_matrix(2, [1.5, 0.5]), 4))
