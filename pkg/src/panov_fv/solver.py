"""Godunov marching schemes for fluxes of the form A_i(x, u) = g_i(beta(x, u)).

One-dimensional update:

    u_i^{n+1} = u_i^n - lambda * (F_{i+1/2} - F_{i-1/2}),
    F_{i+1/2} = godunov(g, beta(x_i, u_i), beta(x_{i+1}, u_{i+1})),

and a two-dimensional variant by dimension splitting: an x-sweep with g_1
produces the half state u^{n+1/2}, a y-sweep with g_2 (beta recomputed from
the half state) completes the step.  The sweep order is fixed x-then-y.

Stability needs lambda_axis * L_g(axis) * L_beta <= 1/2 per axis, where the
Lipschitz constants are taken on [-S, S] with S a bound on |beta| along the
evolution.  :func:`estimate_bounds` derives S from the initial data via the
steady states k_alpha, and :func:`select_dt` turns it into a time step.

Ghost cells: the evolved state u is extended by the configured boundary
policy; the coordinates feeding beta (and hence r and k_alpha) are extended
by edge copy, or by wrap-around when the policy is periodic.  The edge-copy
convention makes every steady state k_alpha an exact fixed point of the
scheme, which is the backbone of the entropy structure.

Key components:
    BoundsEstimate, estimate_bounds   a-priori data bounds
    select_dt                         largest stable time step
    step_1d, step_2d, step_2d_parts   single scheme steps
    run                               march to t_end with observers
    interface_fluxes, beta_padded     building blocks shared by diagnostics
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .flux_model import (
    Affine2D,
    CflConstants,
    FluxModel,
    beta_eval,
    beta_field_values,
    cfl_constants,
    godunov_values,
    k_alpha,
)
from .grid import (
    BoundaryPolicy,
    Field,
    Grid,
    Outflow,
    Periodic,
    pad_array,
)

__all__ = [
    "CflViolation",
    "DegenerateFlux",
    "BoundsEstimate",
    "SolverConfig",
    "estimate_bounds",
    "select_dt",
    "aux_policy",
    "sweep_coords",
    "padded_coords",
    "beta_padded",
    "interface_fluxes",
    "step_1d",
    "step_2d",
    "step_2d_parts",
    "run",
]

# Relative slack on the CFL comparison; absorbs only rounding, never a
# genuinely larger step.
_CFL_SLACK = 1e-9


class CflViolation(RuntimeError):
    """The configured time step breaks lambda * L_g * L_beta <= 1/2."""


class DegenerateFlux(RuntimeError):
    """Every axis has L_g * L_beta = 0, so no finite step bound exists.

    Raised by :func:`select_dt` only when no t_end is supplied; with a
    t_end the flux is constant in time and one step of t_end is returned.
    """


@dataclass(frozen=True)
class BoundsEstimate:
    """A-priori bounds derived from initial data.

    alpha_minus <= beta(x, u0(x)) <= alpha_plus over all cells, and
    |k_alpha(x)| <= Mbound for alpha in {alpha_minus, alpha_plus}; the
    scheme then keeps |u| <= Mbound for all time.
    """

    alpha_minus: float
    alpha_plus: float
    Mbound: float


@dataclass(frozen=True)
class SolverConfig:
    """Marching parameters.

    Exactly one of three time-step sources applies: an explicit ``dt``, an
    explicit ``lambdas`` tuple (dt/dx per axis, must agree on dt), or the
    automatic choice from ``cfl_fraction`` (fraction of the stability bound
    to use; 1.0 steps at the bound itself).  ``bounds`` overrides the
    initial-data estimate when the caller knows tighter ones.
    """

    t_end: float | None = None
    boundary: BoundaryPolicy = Outflow()
    cfl_fraction: float = 1.0
    dt: float | None = None
    lambdas: tuple[float, ...] | None = None
    bounds: BoundsEstimate | None = None

    def __post_init__(self):
        if not self.cfl_fraction > 0:
            raise ValueError(
                f"cfl_fraction must be positive, got {self.cfl_fraction}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.lambdas is not None:
            object.__setattr__(self, "lambdas",
                               tuple(float(v) for v in self.lambdas))
            if any(v <= 0 for v in self.lambdas):
                raise ValueError(f"lambdas must be positive, got {self.lambdas}")


def estimate_bounds(model: FluxModel, u0field: Field) -> BoundsEstimate:
    """Data bounds alpha_-, alpha_+ and the sup bound M on |u|.

    alpha_+/- are the extremes of beta(x, u0(x)) over the cells; M is the
    largest |k_alpha| over the cells for the two extreme alphas.
    """
    grid = u0field.grid
    beta_vals = beta_field_values(model.beta, grid, u0field.values)
    a_minus = float(beta_vals.min())
    a_plus = float(beta_vals.max())
    coords = grid.meshes()
    x = coords if len(coords) > 1 else coords[0]
    m = 0.0
    for alpha in (a_minus, a_plus):
        k = np.asarray(k_alpha(model.beta, x, alpha), dtype=float)
        m = max(m, float(np.abs(k).max()))
    return BoundsEstimate(alpha_minus=a_minus, alpha_plus=a_plus, Mbound=m)


def select_dt(model: FluxModel, grid: Grid, bounds: BoundsEstimate,
              cfl_fraction: float = 1.0, t_end: float | None = None,
              constants: CflConstants | None = None) -> float:
    """Largest dt with lambda_axis * L_g(axis) * L_beta <= cfl_fraction/2.

    With ``t_end`` the result is additionally clamped to t_end, and a
    degenerate flux (zero bound on every axis) returns t_end in one step.
    """
    if not cfl_fraction > 0:
        raise ValueError(f"cfl_fraction must be positive, got {cfl_fraction}")
    if constants is None:
        constants = cfl_constants(model, bounds.Mbound, grid)
    caps = []
    for axis in range(model.dim):
        rate = constants.L_g[axis] * constants.L_beta
        if rate > 0.0:
            caps.append(cfl_fraction * 0.5 * grid.dx(axis) / rate)
    if not caps:
        if t_end is not None:
            return float(t_end)
        raise DegenerateFlux("L_g * L_beta vanishes on every axis; "
                             "supply t_end to take a single exact step")
    dt = min(caps)
    if t_end is not None:
        dt = min(dt, float(t_end))
    return float(dt)


def aux_policy(boundary: BoundaryPolicy) -> BoundaryPolicy:
    """Ghost policy for coordinate-derived data (r, k_alpha, beta).

    Periodic data wraps; everything else edge-copies, so that ghost cells
    carry the same beta landscape as their edge cell and steady states stay
    exact fixed points.
    """
    return Periodic() if isinstance(boundary, Periodic) else Outflow()


def sweep_coords(grid: Grid, axis: int = 0) -> tuple[np.ndarray, ...]:
    """Cell-center coordinate arrays oriented with the sweep axis last."""
    coords = grid.meshes()
    if grid.dim == 1 or axis == 0:
        return coords
    return tuple(c.T for c in coords)


def padded_coords(grid: Grid, boundary: BoundaryPolicy,
                  axis: int = 0) -> tuple[np.ndarray, ...]:
    """Sweep-oriented coordinates with one ghost layer along the sweep axis."""
    aux = aux_policy(boundary)
    return tuple(pad_array(c, aux, 1, axis=-1) for c in sweep_coords(grid, axis))


def beta_padded(model: FluxModel, grid: Grid, boundary: BoundaryPolicy,
                u_pad: np.ndarray, axis: int = 0) -> np.ndarray:
    """beta over a ghost-extended state, sweep axis last.

    ``u_pad`` must already be extended by one ghost cell along its last
    axis (sweep orientation); the coordinates get the matching auxiliary
    extension.
    """
    coords = padded_coords(grid, boundary, axis)
    x = coords if len(coords) > 1 else coords[0]
    out = np.asarray(beta_eval(model.beta, x, u_pad), dtype=float)
    return np.broadcast_to(out, np.shape(u_pad)).astype(float, copy=False)


def _sweep_last_axis(g, beta_pad: np.ndarray, u: np.ndarray,
                     lam: float) -> tuple[np.ndarray, np.ndarray]:
    """One conservative Godunov sweep along the last axis.

    ``beta_pad`` carries one ghost entry on each end of the last axis.
    Returns the updated state and the interface fluxes (one more entry than
    cells along the last axis; entry i sits between cells i-1 and i).
    """
    flux = godunov_values(g, beta_pad[..., :-1], beta_pad[..., 1:])
    return u - lam * (flux[..., 1:] - flux[..., :-1]), flux


class _Sweeper:
    """Reusable ghost geometry for repeated sweeps on one grid.

    Precomputes padded coordinates per sweep axis and, for affine beta,
    the padded r values, so the marching loop only touches u.
    """

    def __init__(self, model: FluxModel, grid: Grid, boundary: BoundaryPolicy):
        self.model = model
        self.grid = grid
        self.boundary = boundary
        self.coords_pad = [padded_coords(grid, boundary, axis)
                           for axis in range(grid.dim)]
        beta = model.beta
        self.r_pad: list[np.ndarray] | None = None
        if isinstance(beta, Affine2D):
            # beta(x, 0) = r(x) for affine maps; broadcasting against zeros
            # fills constant-r shapes.
            self.r_pad = []
            for coords in self.coords_pad:
                x = coords if len(coords) > 1 else coords[0]
                zeros = np.zeros(np.shape(coords[0]))
                self.r_pad.append(np.asarray(beta_eval(beta, x, zeros),
                                             dtype=float))

    def beta_pad(self, u_pad: np.ndarray, axis: int) -> np.ndarray:
        beta = self.model.beta
        if self.r_pad is not None:
            return beta.a * u_pad + self.r_pad[axis]
        x = self.coords_pad[axis][0]
        return np.asarray(beta.eval(x, u_pad), dtype=float)

    def sweep(self, u: np.ndarray, axis: int, lam: float) -> np.ndarray:
        """Advance the state one sweep along ``axis``, natural orientation."""
        v = u if (self.grid.dim == 1 or axis == 0) else u.T
        v_pad = pad_array(v, self.boundary, 1, axis=-1, spatial_axis=axis)
        b_pad = self.beta_pad(v_pad, axis)
        v_new, _ = _sweep_last_axis(self.model.components[axis], b_pad, v, lam)
        return v_new if (self.grid.dim == 1 or axis == 0) else v_new.T


def interface_fluxes(model: FluxModel, field: Field, boundary: BoundaryPolicy,
                     axis: int = 0) -> np.ndarray:
    """Godunov interface fluxes along one axis, natural orientation.

    The result has one more entry than cells along ``axis``; entry i is the
    flux between cells i-1 and i, with domain-boundary interfaces included
    (ghost cells per the policy).
    """
    grid = field.grid
    transposed = grid.dim == 2 and axis == 1
    u = field.values.T if transposed else field.values
    u_pad = pad_array(u, boundary, 1, axis=-1, spatial_axis=axis)
    b_pad = beta_padded(model, grid, boundary, u_pad, axis)
    flux = godunov_values(model.components[axis], b_pad[..., :-1], b_pad[..., 1:])
    return flux.T if transposed else flux


def _check_cfl(grid: Grid, constants: CflConstants, dt: float,
               dim: int) -> None:
    for axis in range(dim):
        lam = dt / grid.dx(axis)
        rate = constants.L_g[axis] * constants.L_beta
        if lam * rate > 0.5 * (1.0 + _CFL_SLACK):
            raise CflViolation(
                f"axis {axis}: lambda={lam:.6g} with L_g={constants.L_g[axis]:.6g}, "
                f"L_beta={constants.L_beta:.6g} gives "
                f"{lam * rate:.6g} > 1/2")


def _resolve_dt(model: FluxModel, grid: Grid, config: SolverConfig,
                bounds: BoundsEstimate, constants: CflConstants,
                horizon: float | None) -> float:
    """The step size a config implies, CFL-checked."""
    if config.dt is not None:
        dt = float(config.dt)
    elif config.lambdas is not None:
        if len(config.lambdas) != grid.dim:
            raise ValueError(f"need {grid.dim} lambdas, got {len(config.lambdas)}")
        dt = config.lambdas[0] * grid.dx(0)
        for axis in range(1, grid.dim):
            other = config.lambdas[axis] * grid.dx(axis)
            if abs(other - dt) > 1e-9 * max(dt, 1.0):
                raise ValueError(
                    "lambdas imply inconsistent dt across axes: "
                    f"{dt} vs {other}")
    else:
        dt = select_dt(model, grid, bounds, cfl_fraction=config.cfl_fraction,
                       t_end=horizon, constants=constants)
    _check_cfl(grid, constants, dt, grid.dim)
    return dt


def _prepare(model: FluxModel, field: Field, config: SolverConfig,
             horizon: float | None):
    grid = field.grid
    if model.dim != grid.dim:
        raise ValueError(f"model is {model.dim}-dimensional but the grid "
                         f"is {grid.dim}-dimensional")
    bounds = config.bounds
    if bounds is None:
        bounds = estimate_bounds(model, field)
    constants = cfl_constants(model, bounds.Mbound, grid)
    dt = _resolve_dt(model, grid, config, bounds, constants, horizon)
    return _Sweeper(model, grid, config.boundary), dt


def step_1d(model: FluxModel, field: Field, config: SolverConfig) -> Field:
    """One conservative Godunov step of the 1D scheme."""
    sweeper, dt = _prepare(model, field, config, horizon=None)
    vals = sweeper.sweep(field.values, 0, dt / field.grid.dx(0))
    return field.with_values(vals, time=field.time + dt)


def step_2d(model: FluxModel, field: Field, config: SolverConfig) -> Field:
    """One split step: x-sweep with g_1, then y-sweep with g_2."""
    return step_2d_parts(model, field, config)[1]


def step_2d_parts(model: FluxModel, field: Field,
                  config: SolverConfig) -> tuple[Field, Field]:
    """One split step, returning (half state, full state).

    The half state is the x-sweep result, stamped at time + dt/2; the
    y-sweep recomputes beta from it.
    """
    sweeper, dt = _prepare(model, field, config, horizon=None)
    grid = field.grid
    if grid.dim != 2:
        raise ValueError("step_2d needs a two-dimensional grid")
    half_vals = sweeper.sweep(field.values, 0, dt / grid.dx(0))
    half = field.with_values(half_vals, time=field.time + dt / 2.0)
    full_vals = sweeper.sweep(half_vals, 1, dt / grid.dx(1))
    return half, field.with_values(full_vals, time=field.time + dt)


def run(model: FluxModel, u0field: Field, config: SolverConfig,
        observers: Sequence[Callable] = ()) -> Field:
    """March from the field's time to config.t_end.

    All steps use the resolved dt except the last, which shrinks to land
    exactly on t_end.  Each observer is called as (step index, time, field)
    after every full step and must not mutate the field.  Identical inputs
    produce bit-identical outputs.
    """
    if config.t_end is None:
        raise ValueError("run requires a config with t_end set")
    grid = u0field.grid
    t0 = u0field.time
    T = float(config.t_end)
    if T < t0:
        raise ValueError(f"t_end={T} lies before the field time {t0}")
    if T == t0:
        return u0field
    sweeper, dt0 = _prepare(model, u0field, config, horizon=T - t0)
    nsteps = max(1, int(math.ceil((T - t0) / dt0 - 1e-9)))
    field = u0field
    for n in range(nsteps):
        t_next = T if n == nsteps - 1 else t0 + (n + 1) * dt0
        dt = t_next - field.time
        vals = field.values
        vals = sweeper.sweep(vals, 0, dt / grid.dx(0))
        if grid.dim == 2:
            vals = sweeper.sweep(vals, 1, dt / grid.dx(1))
        field = field.with_values(vals, time=t_next)
        for obs in observers:
            obs(n, t_next, field)
    return field
