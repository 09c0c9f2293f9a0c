#!/usr/bin/env python3
"""Coarse benchmark walk-through: a staircase flux with infinitely many steps.

The flux here is A(x, u) = g(u + r(x)) with g(z) = z^2 / 2 and r a step
function that climbs by p * q^(n-1) at the breakpoints a_n, which pile up
at a finite point a_inf.  Each odd-numbered breakpoint opens a rarefaction
fan; each even-numbered one carries a stationary shock where u jumps but
the flux g(beta) does not.  The scheme resolves all of them on a uniform
mesh with no special treatment of the interfaces.

Run:  python3 demos/rarefaction_staircase.py
"""

import numpy as np

from panov_fv import make_ex51, run_1d_reference

model, u0, exact, spec = make_ex51()
r = model.beta.r

print("staircase geometry")
print(f"  first breakpoints : {np.round(r.breakpoints[:4], 6)}")
print(f"  accumulation point: {r.a_inf:.12f}  (49/9 = {49/9:.12f})")
print(f"  plateau count     : {r.values.size}")
print(f"  TV(r)             : {r.tv():.6f}")
print()

# The 1D companion study (x-axis flux only) shows the O(sqrt(dx)) trend
# that the discontinuous flux forces; smooth-flux problems would do O(dx).
table = run_1d_reference(model, u0, spec, exact, meshes=(50, 100, 200))
print("1D convergence at t = 1 (benchmark protocol, lambda at 0.8 of bound)")
print(table.to_text())
print()

# Probe the computed solution around the first two wave structures.
from panov_fv import SolverConfig, estimate_bounds, restrict_1d, run, sample_initial

grid = spec.grid(200, dim=1)
field = sample_initial(grid, u0)
bounds = estimate_bounds(model, field)
final = run(restrict_1d(model), field,
            SolverConfig(t_end=spec.t_end, cfl_fraction=spec.cfl_fraction,
                         bounds=bounds))
x = grid.centers()

a2, a3 = r.breakpoints[1], r.breakpoints[2]
near_a2 = np.abs(x - a2) <= 2.5 * grid.dx()
near_a3 = np.abs(x - a3) <= 2.5 * grid.dx()
print(f"cells around a_2 = {a2:.4f}: stationary shock (u jumps, flux does not)")
for xi, ui in zip(x[near_a2], final.values[near_a2]):
    print(f"  x = {xi:7.4f}   u = {ui:+.4f}   exact {exact(1.0, xi):+.4f}")
print(f"cells around a_3 = {a3:.4f}: middle of the fan opened at t = 0")
for xi, ui in zip(x[near_a3], final.values[near_a3]):
    print(f"  x = {xi:7.4f}   u = {ui:+.4f}   exact {exact(1.0, xi):+.4f}")
