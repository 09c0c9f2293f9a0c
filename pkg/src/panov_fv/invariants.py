"""Randomized structural checks of the scheme.

Each check runs seeded random trials on small grids (at most 32 cells per
axis) with random affine beta maps (staircase r with up to 5 jumps, slope
a in [0.5, 2]), random builtin g profiles per axis, mixed 1D/2D, and a
random fraction of the stable time step.  The properties are the
load-bearing structure of the scheme:

    monotonicity      v <= w componentwise is preserved by one step
    l1_contraction    sum|v - w| never grows (periodic)
    tvd_beta          total variation of beta(x, u) never grows, per sweep
    linf_bound        |u| stays below the a-priori bound M
    entropy           the discrete entropy residual stays nonpositive
    conservation      mass change equals the boundary flux exactly

A trial fails only when the measured violation exceeds a rounding-scale
allowance (1e-12, scaled by data size where appropriate); `worst_margin`
records the largest violation minus its allowance, so any positive value
is a failure and the magnitude says by how much.

Key components:
    PropertyResult    per-check outcome with a failure witness
    run_all           the full suite, seeded and deterministic
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diagnostics import entropy_residual, conservation_defect, sample_alphas
from .experiments import AccumulatingStep
from .flux_model import (
    BUILTIN_G,
    Affine2D,
    FluxModel,
    beta_field_values,
    k_alpha,
)
from .grid import Dirichlet, Field, Grid, Outflow, Periodic
from .solver import (
    BoundsEstimate,
    SolverConfig,
    select_dt,
    step_1d,
    step_2d,
    step_2d_parts,
)

__all__ = [
    "PropertyResult",
    "run_all",
    "check_monotonicity",
    "check_l1_contraction",
    "check_tvd_beta",
    "check_linf_bound",
    "check_entropy",
    "check_conservation",
]

_FRACTIONS = (1.0, 0.9, 0.5)


@dataclass(frozen=True)
class PropertyResult:
    """Outcome of one randomized check.

    ``worst_margin`` is the largest (violation - allowance) over all
    trials; any positive value counts as a failure.  ``witness`` describes
    the first failing trial, or is None.
    """

    name: str
    trials: int
    failures: int
    worst_margin: float
    witness: str | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _random_model(rng, dim: int) -> FluxModel:
    a = float(rng.uniform(0.5, 2.0))
    n_jumps = int(rng.integers(0, 6))
    breaks = np.unique(rng.uniform(0.15, 1.85, n_jumps))
    values = rng.uniform(-1.0, 1.0, breaks.size + 1)
    r = AccumulatingStep(breaks, values,
                         a_inf=float(breaks[-1]) if breaks.size else 2.0)
    names = sorted(BUILTIN_G)
    comps = tuple(BUILTIN_G[names[int(rng.integers(0, len(names)))]]
                  for _ in range(dim))
    return FluxModel(components=comps, beta=Affine2D(a=a, r=r, tv_r=r.tv()))


def _random_grid(rng, dim: int, max_cells: int) -> Grid:
    cells = tuple(int(rng.integers(4, max_cells + 1)) for _ in range(dim))
    return Grid((0.0,) * dim, (2.0,) * dim, cells)


def _random_boundary(rng, kinds: tuple[str, ...]):
    kind = kinds[int(rng.integers(0, len(kinds)))]
    if kind == "outflow":
        return Outflow()
    if kind == "periodic":
        return Periodic()
    vals = rng.uniform(-1.0, 1.0, 4)
    return Dirichlet(left=vals[0], right=vals[1], bottom=vals[2], top=vals[3])


def _merged_bounds(model: FluxModel, grid: Grid, fields) -> BoundsEstimate:
    betas = [beta_field_values(model.beta, grid, f.values) for f in fields]
    a_minus = min(float(b.min()) for b in betas)
    a_plus = max(float(b.max()) for b in betas)
    coords = grid.meshes()
    x = coords if len(coords) > 1 else coords[0]
    m = 0.0
    for alpha in (a_minus, a_plus):
        k = np.asarray(k_alpha(model.beta, x, alpha), dtype=float)
        m = max(m, float(np.abs(k).max()))
    return BoundsEstimate(alpha_minus=a_minus, alpha_plus=a_plus, Mbound=m)


def _trial_config(rng, model, grid, boundary, fields):
    bounds = _merged_bounds(model, grid, fields)
    fraction = _FRACTIONS[int(rng.integers(0, len(_FRACTIONS)))]
    dt = select_dt(model, grid, bounds, cfl_fraction=fraction, t_end=1.0)
    config = SolverConfig(boundary=boundary, dt=dt, bounds=bounds)
    return config, dt, bounds


def _advance(model, field, config):
    return (step_1d if field.grid.dim == 1 else step_2d)(model, field, config)


def _tv_beta_parts(model, grid, values, cyclic: bool) -> float:
    """TV of beta over a state: 1D plain, 2D cell-size weighted.

    ``cyclic`` appends the wrap-around neighbor pairs, matching periodic
    ghost cells; otherwise only interior pairs count (the edge-copy ghosts
    of outflow contribute nothing).
    """
    b = beta_field_values(model.beta, grid, values)
    if grid.dim == 1:
        if cyclic:
            b = np.concatenate([b, b[:1]])
        return float(np.abs(np.diff(b)).sum())
    bx = np.concatenate([b, b[:, :1]], axis=1) if cyclic else b
    by = np.concatenate([b, b[:1, :]], axis=0) if cyclic else b
    x_part = np.abs(np.diff(bx, axis=1)).sum()
    y_part = np.abs(np.diff(by, axis=0)).sum()
    return float(grid.dx(1) * x_part + grid.dx(0) * y_part)


def _loop(name: str, seed: int, trials: int, one_trial):
    """Run one_trial(rng, trial) -> (margin, note) and tally violations."""
    rng = np.random.default_rng(seed)
    failures = 0
    worst = -math.inf
    witness = None
    for trial in range(trials):
        margin, note = one_trial(rng, trial)
        worst = max(worst, margin)
        if margin > 0.0:
            failures += 1
            if witness is None:
                witness = f"trial {trial}: {note}, margin {margin:.3e}"
    return PropertyResult(name=name, trials=trials, failures=failures,
                          worst_margin=worst, witness=witness)


def check_monotonicity(seed: int, trials: int = 200,
                       max_cells: int = 32) -> PropertyResult:
    """One step preserves componentwise ordering of states."""

    def one_trial(rng, trial):
        dim = 1 + trial % 2
        model = _random_model(rng, dim)
        grid = _random_grid(rng, dim, max_cells)
        boundary = _random_boundary(rng, ("outflow", "periodic", "dirichlet"))
        v = rng.uniform(-1.0, 1.0, grid.values_shape)
        w = v + rng.uniform(0.0, 1.0, grid.values_shape)
        fv, fw = Field(grid, v), Field(grid, w)
        config, _, _ = _trial_config(rng, model, grid, boundary, (fv, fw))
        sv = _advance(model, fv, config)
        sw = _advance(model, fw, config)
        scale = 1.0 + float(np.abs(w).max())
        margin = float((sv.values - sw.values).max()) - 1e-12 * scale
        return margin, f"dim {dim}, cells {grid.cells}, {type(boundary).__name__}"

    return _loop("monotonicity", seed, trials, one_trial)


def check_l1_contraction(seed: int, trials: int = 200,
                         max_cells: int = 32) -> PropertyResult:
    """sum|v - w| never grows over one periodic step."""

    def one_trial(rng, trial):
        dim = 1 + trial % 2
        model = _random_model(rng, dim)
        grid = _random_grid(rng, dim, max_cells)
        boundary = Periodic()
        fv = Field(grid, rng.uniform(-1.0, 1.0, grid.values_shape))
        fw = Field(grid, rng.uniform(-1.0, 1.0, grid.values_shape))
        config, _, _ = _trial_config(rng, model, grid, boundary, (fv, fw))
        d_before = float(np.abs(fv.values - fw.values).sum())
        sv = _advance(model, fv, config)
        sw = _advance(model, fw, config)
        d_after = float(np.abs(sv.values - sw.values).sum())
        margin = d_after - d_before - 1e-12 * max(1.0, d_before)
        return margin, f"dim {dim}, cells {grid.cells}"

    return _loop("l1_contraction", seed, trials, one_trial)


def check_tvd_beta(seed: int, trials: int = 200,
                   max_cells: int = 32) -> PropertyResult:
    """TV of beta(x, u) never grows, checked per sweep in 2D."""

    def one_trial(rng, trial):
        dim = 1 + trial % 2
        model = _random_model(rng, dim)
        grid = _random_grid(rng, dim, max_cells)
        boundary = _random_boundary(rng, ("outflow", "periodic"))
        cyclic = isinstance(boundary, Periodic)
        field = Field(grid, rng.uniform(-1.0, 1.0, grid.values_shape))
        config, _, _ = _trial_config(rng, model, grid, boundary, (field,))
        states = [field.values]
        if dim == 1:
            states.append(step_1d(model, field, config).values)
        else:
            half, full = step_2d_parts(model, field, config)
            states.extend([half.values, full.values])
        margin = -math.inf
        for before, after in zip(states, states[1:]):
            tv0 = _tv_beta_parts(model, grid, before, cyclic)
            tv1 = _tv_beta_parts(model, grid, after, cyclic)
            margin = max(margin, tv1 - tv0 - 1e-12 * max(1.0, tv0))
        return margin, f"dim {dim}, cells {grid.cells}, {type(boundary).__name__}"

    return _loop("tvd_beta", seed, trials, one_trial)


def check_linf_bound(seed: int, trials: int = 200,
                     max_cells: int = 32) -> PropertyResult:
    """|u| stays within the a-priori bound M over three steps."""

    def one_trial(rng, trial):
        dim = 1 + trial % 2
        model = _random_model(rng, dim)
        grid = _random_grid(rng, dim, max_cells)
        boundary = _random_boundary(rng, ("outflow", "periodic"))
        field = Field(grid, rng.uniform(-1.0, 1.0, grid.values_shape))
        config, _, bounds = _trial_config(rng, model, grid, boundary, (field,))
        margin = -math.inf
        state = field
        for _ in range(3):
            state = _advance(model, state, config)
            overshoot = float(np.abs(state.values).max()) - bounds.Mbound
            margin = max(margin, overshoot - 1e-12 * (1.0 + bounds.Mbound))
        return margin, f"dim {dim}, cells {grid.cells}, {type(boundary).__name__}"

    return _loop("linf_bound", seed, trials, one_trial)


def check_entropy(seed: int, trials: int = 200,
                  max_cells: int = 32) -> PropertyResult:
    """Discrete entropy residual stays nonpositive over 33 sampled alphas."""

    def one_trial(rng, trial):
        dim = 1 + trial % 2
        model = _random_model(rng, dim)
        grid = _random_grid(rng, dim, max_cells)
        boundary = _random_boundary(rng, ("outflow", "periodic"))
        field = Field(grid, rng.uniform(-1.0, 1.0, grid.values_shape))
        config, dt, bounds = _trial_config(rng, model, grid, boundary, (field,))
        alphas = sample_alphas(bounds)
        if dim == 1:
            after = step_1d(model, field, config)
            residual = entropy_residual(model, field, after, dt, alphas,
                                        axis=0, boundary=boundary)
        else:
            half, full = step_2d_parts(model, field, config)
            residual = max(
                entropy_residual(model, field, half, dt, alphas,
                                 axis=0, boundary=boundary),
                entropy_residual(model, half, full, dt, alphas,
                                 axis=1, boundary=boundary))
        scale = 1.0 + float(np.abs(field.values).max())
        margin = residual - 1e-12 * scale
        return margin, f"dim {dim}, cells {grid.cells}, {type(boundary).__name__}"

    return _loop("entropy", seed, trials, one_trial)


def check_conservation(seed: int, trials: int = 200,
                       max_cells: int = 32) -> PropertyResult:
    """Mass change equals the boundary flux integral to rounding."""

    def one_trial(rng, trial):
        dim = 1 + trial % 2
        model = _random_model(rng, dim)
        grid = _random_grid(rng, dim, max_cells)
        boundary = _random_boundary(rng, ("outflow", "periodic", "dirichlet"))
        field = Field(grid, rng.uniform(-1.0, 1.0, grid.values_shape))
        config, dt, _ = _trial_config(rng, model, grid, boundary, (field,))
        if dim == 1:
            states = (field, step_1d(model, field, config))
        else:
            half, full = step_2d_parts(model, field, config)
            states = (field, half, full)
        defect = conservation_defect(model, states, dt, boundary)
        margin = defect - 1e-12
        return margin, f"dim {dim}, cells {grid.cells}, {type(boundary).__name__}"

    return _loop("conservation", seed, trials, one_trial)


_CHECKS = (
    check_monotonicity,
    check_l1_contraction,
    check_tvd_beta,
    check_linf_bound,
    check_entropy,
    check_conservation,
)


def run_all(seed: int = 1729, trials: int = 200,
            max_cells: int = 32) -> list[PropertyResult]:
    """Run every check with per-check derived seeds; deterministic."""
    return [check(seed + 101 * k, trials=trials, max_cells=max_cells)
            for k, check in enumerate(_CHECKS)]
