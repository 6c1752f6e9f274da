"""
Approximate reachability of a sine-modulated Gaussian with staircase controls.

The target 2 sqrt(2/pi) e^(1/4) exp(-x^2/4) sin(x/sqrt 2) has a rapidly
converging expansion in odd Hermite functions.  Each basis element is the
image of a derivative of a Dirac pulse at t = 0, and a derivative of a pulse
is approximated by a binomial staircase of width 1/l.  Summing the staircases
with the right weights gives a piecewise-constant boundary control whose end
state is provably close to the target; here we compare the guaranteed bound
with the error actually achieved.

Run with ``python demos/staircase_synthesis.py``.
"""

import numpy as np

from heatreach import (
    ControlledState,
    HermiteExpansion,
    SpectralProfile,
    epsilon_bounds,
    error_norm,
    example3,
    synthesize,
)

T = 1.0
target = example3(T)
V_target = SpectralProfile.of_state(target)

print(" N     l      eps1      eps2       eps    measured   |u|_inf")
for N, l in [(1, 10), (1, 100), (2, 100), (2, 1000), (3, 1000)]:
    expansion = HermiteExpansion(T, target.omegas(N))
    plan, u = synthesize(expansion, l)
    eps1, eps2 = epsilon_bounds(N, l, T)
    measured = error_norm(V_target, plan.profile())
    print(f"{N:2d} {l:5d}  {eps1:8.5f}  {eps2:8.5f}  {eps1 + eps2:8.5f}  {measured:9.6f}  {u.linf_norm:9.3g}")

# the bound is loose, and most of the error comes from truncating the expansion
N, l = 2, 1000
plan, u = synthesize(HermiteExpansion(T, target.omegas(N)), l)
x = np.linspace(0.0, 8.0, 9)
print("\nN=2, l=1000 on a coarse grid")
print("  x       target      reached")
for xi, a, b in zip(x, target(x), ControlledState(u)(x)):
    print(f"  {xi:4.1f}  {a: .6f}  {b: .6f}")

# the control lives on [0, 3/l] and then switches off
print(f"\ncontrol support ends at t = {u.breakpoints[-2]:.4f}; levels {np.array2string(u.levels[:-1], precision=4)}")
