"""
A quick test that rules targets out.

Anything reachable from rest with |u| <= L in time T is damped by the heat
kernel, so its weighted integral

    int_0^inf exp(x^2 / 4T*) |W(x)| dx

cannot exceed L sqrt(T*/pi) log((sqrt T* + sqrt T) / (sqrt T* - sqrt T))
for any T* > T.  The demo checks two reachable targets, scales one until the
test fails, and tries a Gaussian that is too wide to be reachable at all.

Run with ``python demos/necessary_condition.py``.
"""

import numpy as np

from heatreach import example1, example2, necessary_condition

T, L, T_star = 1.0, 1.0, 4.0

for name, target in [("v(s) = s", example1(T)), ("v(s) = 1 - s", example2(T))]:
    res = necessary_condition(target, T, L, T_star)
    print(f"{name:14s} lhs {res.lhs:.5f}  rhs {res.rhs:.5f}  satisfied: {res.satisfied}")

base = necessary_condition(example1(T), T, L, T_star)
for c in (1.0, 2.0, 3.0):
    res = necessary_condition(c * example1(T), T, L, T_star)
    print(f"{c:.0f} x target   lhs {res.lhs:.5f}  satisfied: {res.satisfied}")

# exp(-x^2/20) decays slower than exp(x^2/16) grows: the integral diverges
res = necessary_condition(lambda x: x * np.exp(-x * x / 20), T, L, T_star)
print(f"wide Gaussian  lhs {res.lhs}  satisfied: {res.satisfied}")
