"""Benchmark problems with accumulating flux discontinuities.

Two flagship problems on [0,6] x [0,6], both with beta(x, u) = u + r(x)
where r is a staircase whose jumps accumulate at a finite point, so the
flux has infinitely many spatial discontinuities and no isolated-interface
treatment applies:

    ex51  g_1 = z^2/2, g_2 = sin(z); r steps down p*q^{n-1} -> 0 across
          cells C_n = [a_n, a_{n+1}) accumulating at a_inf = 49/9.  The
          initial staircase resolves into stationary shocks at the even
          breakpoints and rarefaction fans centered at the odd ones; at
          t = 1 each fan exactly fills its two cells, giving a closed-form
          solution.
    ex52  g_1 piecewise linear with a flat stretch, g_2 = sin(z);
          r oscillates around 1 on breakpoints accumulating at x = 5 and
          u0 = 2.  On the attained beta range g_1 is the identity, so the
          evolution is linear transport with a spatial source and
          u(t,x,y) = 2 + r(x - t) - r(x) exactly; by t = 6 the state has
          relaxed to the steady state with beta = 4.

A third problem, steady, evolves an exact steady state of the ex52 flux
and must stay put to machine precision.

The convergence driver runs a mesh ladder (concurrently across levels),
measures L1 errors against the exact solutions plus total variations of u
and beta, and tabulates experimental orders of convergence.

Key components:
    AccumulatingStep                staircase with accumulating breakpoints
    make_ex51, make_ex52, make_steady   problem factories
    run_convergence, run_1d_reference   mesh-ladder drivers
    ConvergenceTable                result table with CSV/text export
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .diagnostics import eoc, l1_distance, tv_1d, tv_of_beta, tv_2d
from .flux_model import BUILTIN_G, Affine2D, FluxModel, k_alpha
from .grid import Field, Grid, Outflow, sample_initial
from .solver import SolverConfig, run

__all__ = [
    "DimensionalityMismatch",
    "AccumulatingStep",
    "ExperimentSpec",
    "make_ex51",
    "make_ex52",
    "make_steady",
    "PROBLEMS",
    "restrict_1d",
    "ConvergenceTable",
    "run_convergence",
    "run_1d_reference",
    "worker_count",
]

# Plateaus shorter than this are dropped from the staircases; the induced
# domain perturbation is below every tolerance in use.
_PLATEAU_FLOOR = 1e-14


class DimensionalityMismatch(ValueError):
    """A 1D reduction was requested for a genuinely 2D flux."""


@dataclass(frozen=True, eq=False)
class AccumulatingStep:
    """Piecewise-constant function with finitely truncated breakpoints.

    values[j] applies on [breakpoints[j-1], breakpoints[j]), half-open on
    the right, with values[0] left of all breakpoints and values[-1] from
    the last breakpoint on.  ``a_inf`` records the analytic accumulation
    point of the untruncated sequence.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    a_inf: float

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if vals.size != bp.size + 1:
            raise ValueError("need exactly one more value than breakpoints")
        if bp.size and not (np.diff(bp) > 0).all():
            raise ValueError("breakpoints must increase strictly")
        if not (np.isfinite(bp).all() and np.isfinite(vals).all()):
            raise ValueError("breakpoints and values must be finite")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    def __call__(self, x, y=None):
        x_arr = np.asarray(x, dtype=float)
        out = self.values[np.searchsorted(self.breakpoints, x_arr, side="right")]
        return float(out) if np.ndim(x) == 0 else out

    def tv(self) -> float:
        """Total variation: sum of the jump sizes."""
        return float(np.abs(np.diff(self.values)).sum())


@dataclass(frozen=True)
class ExperimentSpec:
    """Problem metadata for the convergence drivers."""

    name: str
    t_end: float
    origin: tuple[float, float] = (0.0, 0.0)
    extent: tuple[float, float] = (6.0, 6.0)
    meshes: tuple[int, ...] = (50, 100, 200, 400)
    cfl_fraction: float = 1.0

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if len(self.meshes) and not all(
                a < b for a, b in zip(self.meshes, self.meshes[1:])):
            raise ValueError(f"mesh list must increase strictly, got {self.meshes}")

    def grid(self, M: int, dim: int = 2) -> Grid:
        return Grid(self.origin[:dim], self.extent[:dim], (int(M),) * dim)


def make_ex51():
    """Rarefactions-and-shocks problem: Burgers-in-beta along x, sin along y.

    Returns (model, u0, exact, spec); exact is a point function
    (t, x[, y]) valid for 0 <= t <= 1.
    """
    p, q = 4.0, 0.8
    # Plateau widths a~_n come in equal pairs: the fan centered at the odd
    # breakpoint a_n spans its two neighbor cells exactly at t = 1.
    n_pl = 1
    while p * q ** n_pl >= _PLATEAU_FLOOR:
        n_pl += 1
    n = np.arange(1, n_pl + 1)
    tilde = np.where(n % 2 == 1,
                     p * q ** (n - 1) - p * q ** n,
                     p * q ** (n - 2) - p * q ** (n - 1))
    breaks = np.concatenate([[1.0], 1.0 + np.cumsum(tilde)])
    a_inf = 1.0 + 2.0 * p / (1.0 + q)

    r_vals = np.concatenate([[p], p * q ** (n - 1), [0.0]])
    r_step = AccumulatingStep(breaks, r_vals, a_inf)
    u0_vals = np.concatenate([[-p * q],
                              np.where(n % 2 == 1, -p * q ** n,
                                       -p * q ** (n - 2)),
                              [0.0]])
    u0_step = AccumulatingStep(breaks, u0_vals, a_inf)

    # Region parameters indexed by searchsorted output: regions 0 and 1
    # (left of a_2) stay at -p*q, the last region (past the truncation
    # point) at 0, and region n in between is the fan piece
    # clip((x - c_n)/t, -a~_n, a~_n) - p*q^{n-1} with c_n the odd-indexed
    # fan center a_n, or a_{n+1} when n is even.
    centers = np.ones(n_pl + 2)
    amps = np.zeros(n_pl + 2)
    roffs = np.zeros(n_pl + 2)
    centers[2:n_pl + 1] = np.where(n[1:] % 2 == 1,
                                   breaks[n[1:] - 1], breaks[n[1:]])
    amps[2:n_pl + 1] = tilde[1:]
    roffs[2:n_pl + 1] = p * q ** (n[1:] - 1)

    def exact(t, x, y=None):
        x_arr = np.asarray(x, dtype=float)
        if t <= 0.0:
            out = np.asarray(u0_step(x_arr), dtype=float)
            return float(out) if np.ndim(x) == 0 else out
        idx = np.searchsorted(breaks, x_arr, side="right")
        fan = (np.clip((x_arr - centers[idx]) / t, -amps[idx], amps[idx])
               - roffs[idx])
        out = np.where(idx <= 1, -p * q,
                       np.where(idx >= n_pl + 1, 0.0, fan))
        return float(out) if np.ndim(x) == 0 else out

    model = FluxModel(components=(BUILTIN_G["burgers"], BUILTIN_G["sin"]),
                      beta=Affine2D(a=1.0, r=r_step, tv_r=r_step.tv()))
    # The benchmark protocol runs at 0.8 of the stability bound
    # (lambda = 0.4 / rate); callers can override per run.
    spec = ExperimentSpec(name="ex51", t_end=1.0, cfl_fraction=0.8)
    return model, u0_step, exact, spec


def make_ex52():
    """Relaxation-to-steady-state problem with a flat-stretch g_1.

    Returns (model, u0, exact, spec); exact is a point function
    (t, x[, y]) valid for every t >= 0.
    """
    n_pl = 1
    while 0.8 ** (n_pl + 1) >= _PLATEAU_FLOOR:
        n_pl += 1
    n = np.arange(1, n_pl + 1)
    breaks = np.concatenate([5.0 * (1.0 - 0.8 ** n), [5.0]])
    r_vals = np.concatenate([[2.0], 1.0 - (-0.8) ** n, [1.0]])
    r_step = AccumulatingStep(breaks, r_vals, 5.0)

    def u0(x, y=None):
        x_arr = np.asarray(x, dtype=float)
        out = np.full(x_arr.shape, 2.0)
        return 2.0 if np.ndim(x) == 0 else out

    def exact(t, x, y=None):
        # On the attained beta range [2.36, 4] the x-profile g_1 is the
        # identity, so du/dt + du/dx = -dr/dx: linear transport with a
        # stationary source, solved exactly by characteristics.
        x_arr = np.asarray(x, dtype=float)
        if t <= 0.0:
            out = np.full(x_arr.shape, 2.0)
        else:
            out = 2.0 + r_step(x_arr - t) - r_step(x_arr)
        return float(out) if np.ndim(x) == 0 else out

    model = FluxModel(components=(BUILTIN_G["ex52_g1"], BUILTIN_G["sin"]),
                      beta=Affine2D(a=1.0, r=r_step, tv_r=r_step.tv()))
    spec = ExperimentSpec(name="ex52", t_end=6.0, cfl_fraction=0.8)
    return model, u0, exact, spec


def make_steady(alpha: float = 3.0):
    """Exact steady state k_alpha of the ex52 flux; nothing may move."""
    base_model, _, _, _ = make_ex52()

    def u0(x, y=None):
        return k_alpha(base_model.beta, np.asarray(x, dtype=float), alpha)

    def exact(t, x, y=None):
        return u0(x, y)

    spec = ExperimentSpec(name="steady", t_end=1.0, cfl_fraction=0.8)
    return base_model, u0, exact, spec


PROBLEMS: dict[str, Callable] = {
    "ex51": make_ex51,
    "ex52": make_ex52,
    "steady": make_steady,
}


def restrict_1d(model: FluxModel) -> FluxModel:
    """The x-axis restriction of a 2D model (g_1 only, same beta)."""
    return FluxModel(components=model.components[:1], beta=model.beta)


def worker_count(jobs: int) -> int:
    """Thread-pool size for a fan-out of ``jobs`` independent runs.

    PANOV_FV_THREADS caps the pool when set; otherwise one thread per job
    up to the CPU count.
    """
    env = os.environ.get("PANOV_FV_THREADS")
    if env is not None:
        cap = int(env)
        if cap < 1:
            raise ValueError(f"PANOV_FV_THREADS must be >= 1, got {env}")
        return max(1, min(jobs, cap))
    return max(1, min(jobs, os.cpu_count() or 1))


@dataclass(frozen=True)
class ConvergenceTable:
    """One convergence study: per-mesh errors, variations, and orders."""

    problem: str
    dim: int
    meshes: tuple[int, ...]
    errors: tuple[float, ...] | None
    tv_u: tuple[float, ...]
    tv_beta: tuple[float, ...]
    orders: tuple[float, ...] | None

    def min_order(self) -> float | None:
        if self.orders is None or not self.orders:
            return None
        return min(self.orders)

    def rows(self):
        for k, M in enumerate(self.meshes):
            e = None if self.errors is None else self.errors[k]
            order = None if (self.orders is None or k == 0) else self.orders[k - 1]
            yield M, e, self.tv_u[k], self.tv_beta[k], order

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("M,e,tv_u,tv_beta,eoc\n")
            for M, e, tvu, tvb, order in self.rows():
                cells = [str(M),
                         "" if e is None else f"{e:.17g}",
                         f"{tvu:.17g}", f"{tvb:.17g}",
                         "" if order is None else f"{order:.17g}"]
                fh.write(",".join(cells) + "\n")

    def to_text(self) -> str:
        header = ["M", "e", "tv_u", "tv_beta", "eoc"]
        rows = [header]
        for M, e, tvu, tvb, order in self.rows():
            rows.append([str(M),
                         "-" if e is None else f"{e:.6g}",
                         f"{tvu:.6g}", f"{tvb:.6g}",
                         "-" if order is None else f"{order:.4g}"])
        widths = [max(len(row[c]) for row in rows) for c in range(len(header))]
        lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths))
                 for row in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


def _solve_level(model, u0, spec, M, dim, exact, cfl_fraction, dt):
    grid = spec.grid(M, dim)
    field = sample_initial(grid, u0)
    config = SolverConfig(t_end=spec.t_end, boundary=Outflow(),
                          cfl_fraction=cfl_fraction, dt=dt)
    final = run(model, field, config)
    err = None
    if exact is not None:
        err = l1_distance(final, lambda *coords: exact(spec.t_end, *coords))
    tvu = tv_1d(final.values) if dim == 1 else tv_2d(final)
    tvb = tv_of_beta(model, final)
    return final, err, tvu, tvb


def _tabulate(problem, dim, meshes, results, extent):
    errors = tuple(r[1] for r in results)
    has_errors = all(e is not None for e in errors)
    orders = None
    if has_errors and len(meshes) >= 2:
        orders = tuple(eoc([(extent / M, e)
                            for M, e in zip(meshes, errors)]))
    return ConvergenceTable(
        problem=problem, dim=dim, meshes=tuple(int(M) for M in meshes),
        errors=errors if has_errors else None,
        tv_u=tuple(r[2] for r in results),
        tv_beta=tuple(r[3] for r in results),
        orders=orders)


def run_convergence(model: FluxModel, u0: Callable, spec: ExperimentSpec,
                    exact: Callable | None = None,
                    meshes: Sequence[int] | None = None,
                    cfl_fraction: float | None = None,
                    dt: float | None = None) -> ConvergenceTable:
    """Run the 2D mesh ladder and tabulate errors, variations, and orders.

    Mesh levels are independent and run on a thread pool sized by
    :func:`worker_count`; rows keep the mesh-list order regardless of
    completion order.
    """
    meshes = tuple(spec.meshes if meshes is None else meshes)
    fraction = spec.cfl_fraction if cfl_fraction is None else cfl_fraction
    with ThreadPoolExecutor(max_workers=worker_count(len(meshes))) as pool:
        results = list(pool.map(
            lambda M: _solve_level(model, u0, spec, M, 2, exact, fraction, dt),
            meshes))
    return _tabulate(spec.name, 2, meshes, results, spec.extent[0])


def run_1d_reference(model: FluxModel, u0: Callable, spec: ExperimentSpec,
                     exact: Callable | None = None,
                     meshes: Sequence[int] | None = None,
                     cfl_fraction: float | None = None,
                     dt: float | None = None) -> ConvergenceTable:
    """The x-axis-only companion study (flux g_1 on [origin_x, +extent_x]).

    Raises DimensionalityMismatch when beta genuinely depends on y, probed
    by comparing beta on two y levels across the domain.
    """
    _require_y_independent(model, spec)
    model_1d = restrict_1d(model)
    meshes = tuple(spec.meshes if meshes is None else meshes)
    fraction = spec.cfl_fraction if cfl_fraction is None else cfl_fraction
    with ThreadPoolExecutor(max_workers=worker_count(len(meshes))) as pool:
        results = list(pool.map(
            lambda M: _solve_level(model_1d, u0, spec, M, 1, exact,
                                   fraction, dt),
            meshes))
    return _tabulate(spec.name, 1, meshes, results, spec.extent[0])


def _require_y_independent(model: FluxModel, spec: ExperimentSpec,
                           samples: int = 257) -> None:
    beta = model.beta
    if not isinstance(beta, Affine2D):
        return
    xs = np.linspace(spec.origin[0], spec.origin[0] + spec.extent[0], samples)
    try:
        lo = np.broadcast_to(
            np.asarray(beta.r(xs, np.full(samples, spec.origin[1])),
                       dtype=float), xs.shape)
        hi = np.broadcast_to(
            np.asarray(beta.r(xs, np.full(samples,
                                          spec.origin[1] + spec.extent[1])),
                       dtype=float), xs.shape)
    except TypeError:
        # r takes a single coordinate, hence cannot depend on y.
        return
    if not np.array_equal(lo, hi):
        raise DimensionalityMismatch(
            "beta depends on y; no 1D reference exists")
