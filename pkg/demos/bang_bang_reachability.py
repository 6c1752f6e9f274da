"""
Reaching a target exactly with an on/off boundary control.

Two targets are built by driving the half-line heat equation from rest with
the smooth boundary profiles v(s) = s and v(s) = 1 - s.  We then forget how
they were made and ask: which {0, 1}-valued control with P "on" intervals
matches the first 2P power moments of the target?  As P grows the end state
produced by that control closes in on the target.

Run with ``python demos/bang_bang_reachability.py``.
"""

import numpy as np

from heatreach import ControlledState, error_norm, example1, example2, moments_of_target, solve_bang_bang

T = 1.0
x = np.linspace(0.0, 6.0, 7)

for name, target in [("v(s) = s", example1(T)), ("v(s) = 1 - s", example2(T))]:
    print(f"\ntarget reached by {name}")
    print(f"  target on x = {x.tolist()}:")
    print("   ", np.array2string(target(x), precision=5))

    for P in range(1, 5):
        moments = moments_of_target(target, 2 * P - 1, T)
        sol = solve_bang_bang(moments, P)

        # the solver works in reversed time; the boundary sees u(t) = v(T - t)
        u = sol.boundary_control()
        reached = ControlledState(u)

        nx = error_norm(target, reached, side="x")
        ns = error_norm(target, reached, side="sigma")
        nu = ", ".join(f"{v:.4f}" for v in sol.nu)
        print(f"  P={P}: switches at [{nu}]  residual {sol.residual_inf:.1e}")
        print(f"       ||W_T - W_N|| = {nx:.6f}  (Fourier side {ns:.6f})")
