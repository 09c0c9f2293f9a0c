#!/usr/bin/env python3
"""Steady states are machine-exact fixed points of the scheme.

For any level alpha between the data bounds, the field k_alpha(x) solving
beta(x, k_alpha(x)) = alpha makes every interface see the same beta on both
sides, so every Godunov flux equals g(alpha) and the update is exactly
zero, in floating point, not just to truncation order.  This is the
discrete counterpart of the well-balanced property: the scheme preserves
the steady states of the continuous problem on any mesh, including meshes
that do not align with the jumps of r.

Run:  python3 demos/steady_state_exactness.py
"""

import numpy as np

from panov_fv import (
    SolverConfig,
    estimate_bounds,
    k_alpha,
    make_ex51,
    make_ex52,
    make_steady,
    run_convergence,
    sample_initial,
    select_dt,
    step_2d,
)

for factory in (make_ex51, make_ex52):
    model, u0, exact, spec = factory()
    grid = spec.grid(32, dim=2)
    bounds = estimate_bounds(model, sample_initial(grid, u0))
    alpha = 0.5 * (bounds.alpha_minus + bounds.alpha_plus)
    xs, ys = grid.meshes()
    k_vals = np.asarray(k_alpha(model.beta, (xs, ys), alpha), dtype=float)
    field = sample_initial(grid, u0).with_values(k_vals)
    dt0 = select_dt(model, grid, bounds, spec.cfl_fraction)
    config = SolverConfig(dt=dt0, bounds=bounds)
    for _ in range(100):
        field = step_2d(model, field, config)
    drift = float(np.abs(field.values - k_vals).max())
    print(f"{spec.name}: alpha = {alpha:.4f}, 100 steps on 32 x 32, "
          f"max drift = {drift:.1e}")

print()
print("convergence study on the steady problem (errors are exactly zero,")
print("so the EOC column reports the resolved sentinel):")
model, u0, exact, spec = make_steady()
table = run_convergence(model, u0, spec, exact, meshes=(8, 16, 32))
print(table.to_text())
print(f"min order: {table.min_order()}")
