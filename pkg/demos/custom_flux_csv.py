#!/usr/bin/env python3
"""Build a problem of your own: staircase flux from a two-column CSV.

The CSV format is the one the command line accepts for --r-csv: each line
is "breakpoint,value", the value applies from that breakpoint rightward
(half-open), and the first value also extends left of the first
breakpoint.  This script assembles the same model through the library API,
runs it, and prints the diagnostics the CLI would put in report.json.

Run:  python3 demos/custom_flux_csv.py
"""

import io

import numpy as np

from panov_fv import (
    BUILTIN_G,
    Affine2D,
    FluxModel,
    SolverConfig,
    AccumulatingStep,
    estimate_bounds,
    interface_fluxes,
    run,
    sample_initial,
    tv_of_beta,
)
from panov_fv.grid import Grid, Outflow

CSV = """\
0.5,0.0
1.0,0.8
1.5,1.2
2.0,1.0
"""

rows = np.loadtxt(io.StringIO(CSV), delimiter=",")
breaks, values = rows[:, 0], rows[:, 1]
r = AccumulatingStep(breaks, np.concatenate([values[:1], values]),
                     a_inf=float(breaks[-1]))
print(f"r: {breaks.size} breakpoints, TV(r) = {r.tv():.4f}")

model = FluxModel(components=(BUILTIN_G["burgers"],),
                  beta=Affine2D(a=1.0, r=r, tv_r=r.tv()))

grid = Grid(origin=(0.0,), extent=(4.0,), cells=(128,))
field = sample_initial(grid, lambda x: np.where(x < 2.0, 1.5, -0.5))
bounds = estimate_bounds(model, field)
print(f"alpha range [{bounds.alpha_minus:.3f}, {bounds.alpha_plus:.3f}], "
      f"|u| <= {bounds.Mbound:.3f}")

final = run(model, field, SolverConfig(t_end=0.75, bounds=bounds))
print(f"t = {final.time}: u in [{final.values.min():+.4f}, "
      f"{final.values.max():+.4f}]")
print(f"TV(beta) after the run: {tv_of_beta(model, final):.6f} "
      f"(initial {tv_of_beta(model, field):.6f})")

fluxes = interface_fluxes(model, final, Outflow())
mass_rate = -(fluxes[-1] - fluxes[0]) * 1.0
print(f"instantaneous mass balance dM/dt = {mass_rate:+.6f} "
      "(outflow boundaries)")

print()
print("the command line equivalent, given this CSV in r.csv:")
print("  panov-fv run --problem custom --g1 burgers --r-csv r.csv \\")
print("      --u0-const 1.5 --origin 0,0 --extent 4,4 --dim 1 \\")
print("      --mesh 128 --t-end 0.75 --out-dir out/")
