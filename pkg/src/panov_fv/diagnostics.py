"""Discrete functionals measured on scheme states.

Total variation (plain 1D sum and the cell-size-weighted 2D double sum),
L1 distances between fields or against a closed-form solution, the discrete
entropy residual against steady states k_alpha, the conservation defect of
a step, the time-continuity modulus of a run, and experimental orders of
convergence.

All functions are read-only reductions; none mutates a field.

Key components:
    tv_1d, tv_2d             total variation
    l1_distance              cell-volume-weighted L1 distance
    entropy_residual         signed max of the discrete entropy inequality
    conservation_defect      relative mass-balance defect of one step
    time_continuity          modulus nu(u, sigma) over snapshots
    eoc                      orders log2(e_k / e_{k+1}) under mesh halving
    DiagnosticsReport        bundle with a pinned-key JSON export
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .flux_model import (
    FluxModel,
    beta_eval,
    beta_field_values,
    godunov_values,
    k_alpha,
)
from .grid import BoundaryPolicy, Field, Outflow, pad_array
from .solver import BoundsEstimate, interface_fluxes, padded_coords

__all__ = [
    "GridMismatch",
    "tv_1d",
    "tv_2d",
    "tv_of_beta",
    "l1_distance",
    "sample_alphas",
    "entropy_residual",
    "conservation_defect",
    "time_continuity",
    "eoc",
    "DiagnosticsReport",
    "report_dict",
    "write_report",
]


class GridMismatch(ValueError):
    """Two fields that must share a grid do not."""


def tv_1d(values: np.ndarray) -> float:
    """Total variation of a sequence: sum of |a_i - a_{i-1}| over neighbors."""
    values = np.asarray(values, dtype=float)
    return float(np.abs(np.diff(values)).sum())


def tv_2d(field: Field) -> float:
    """Weighted total variation of a 2D field.

    dy * sum |a_ij - a_{i-1,j}|  +  dx * sum |a_ij - a_{i,j-1}|,
    interior neighbor pairs only.  On a y-constant field this reduces to
    (y-extent) times the 1D total variation of any row.
    """
    grid = field.grid
    if grid.dim != 2:
        raise ValueError("tv_2d needs a two-dimensional field")
    a = field.values
    x_part = np.abs(np.diff(a, axis=1)).sum()
    y_part = np.abs(np.diff(a, axis=0)).sum()
    return float(grid.dx(1) * x_part + grid.dx(0) * y_part)


def tv_of_beta(model: FluxModel, field: Field) -> float:
    """Total variation of beta(x, u) over the field's cells.

    Plain 1D sum on one-dimensional grids, the weighted double sum on
    two-dimensional ones.
    """
    vals = beta_field_values(model.beta, field.grid, field.values)
    if field.grid.dim == 1:
        return tv_1d(vals)
    return tv_2d(Field(field.grid, vals, field.time))


def _callable_values(grid, func: Callable) -> np.ndarray:
    vals = np.asarray(func(*grid.meshes()), dtype=float)
    return np.broadcast_to(vals, grid.values_shape)


def l1_distance(f: Field, g: Union[Field, Callable]) -> float:
    """Cell-volume-weighted L1 distance.

    ``g`` may be a field on the same grid or a point function of the
    spatial coordinates, evaluated at cell centers (midpoint quadrature).
    """
    if isinstance(g, Field):
        if g.grid != f.grid:
            raise GridMismatch("l1_distance needs fields on one grid")
        g_vals = g.values
    else:
        g_vals = _callable_values(f.grid, g)
    return float(np.abs(f.values - g_vals).sum() * f.grid.cell_volume)


def sample_alphas(bounds: BoundsEstimate, n: int = 33) -> np.ndarray:
    """Uniform alpha samples spanning [alpha_minus, alpha_plus], ends included."""
    return np.linspace(bounds.alpha_minus, bounds.alpha_plus, n)


def entropy_residual(model: FluxModel, before: Field, after: Field, dt: float,
                     alphas: Sequence[float], axis: int = 0,
                     boundary: BoundaryPolicy = Outflow()) -> float:
    """Signed maximum of the discrete entropy residual over cells and alphas.

    For consecutive scheme states (one sweep apart; in 2D check each half
    step with its own axis) and each steady state k = k_alpha the residual

        |u_new - k| - |u_old - k| + lambda * (P_{i+1/2} - P_{i-1/2}),
        P_{i+1/2} = gbar(beta(u v k)) - gbar(beta(u ^ k)),

    is nonpositive for a monotone scheme; positive values flag a violation.
    ``dt`` is the full step size, so lambda = dt / dx(axis).
    """
    grid = before.grid
    if after.grid != grid:
        raise GridMismatch("entropy_residual needs states on one grid")
    transposed = grid.dim == 2 and axis == 1
    u_old = before.values.T if transposed else before.values
    u_new = after.values.T if transposed else after.values
    lam = dt / grid.dx(axis)
    coords = padded_coords(grid, boundary, axis)
    x = coords if len(coords) > 1 else coords[0]
    u_pad = pad_array(u_old, boundary, 1, axis=-1, spatial_axis=axis)
    g = model.components[axis]
    worst = -math.inf
    for alpha in alphas:
        k_pad = np.asarray(k_alpha(model.beta, x, float(alpha)), dtype=float)
        k_pad = np.broadcast_to(k_pad, u_pad.shape)
        b_top = np.asarray(beta_eval(model.beta, x, np.maximum(u_pad, k_pad)),
                           dtype=float)
        b_bot = np.asarray(beta_eval(model.beta, x, np.minimum(u_pad, k_pad)),
                           dtype=float)
        p = (godunov_values(g, b_top[..., :-1], b_top[..., 1:])
             - godunov_values(g, b_bot[..., :-1], b_bot[..., 1:]))
        k_in = k_pad[..., 1:-1]
        res = (np.abs(u_new - k_in) - np.abs(u_old - k_in)
               + lam * (p[..., 1:] - p[..., :-1]))
        worst = max(worst, float(res.max()))
    return worst


def conservation_defect(model: FluxModel, states: Sequence[Field], dt: float,
                        boundary: BoundaryPolicy = Outflow()) -> float:
    """Relative defect of the discrete mass balance over one step.

    ``states`` is (before, after) in 1D and (before, half, after) in 2D,
    matching the split scheme: the x boundary fluxes come from the before
    state, the y boundary fluxes from the half state.  The defect

        |M_after - M_before + dt * (net boundary outflux)|

    is normalized by max(1, L1 norm of the before state) and vanishes to
    rounding for any conservative step (exactly zero net flux when
    periodic).
    """
    before, after = states[0], states[-1]
    grid = before.grid
    if after.grid != grid:
        raise GridMismatch("conservation_defect needs states on one grid")
    vol = grid.cell_volume
    mass_change = (after.values.sum() - before.values.sum()) * vol
    if grid.dim == 1:
        if len(states) != 2:
            raise ValueError("1D conservation check takes (before, after)")
        flux = interface_fluxes(model, before, boundary, axis=0)
        net_out = dt * (flux[-1] - flux[0])
    else:
        if len(states) != 3:
            raise ValueError("2D conservation check takes (before, half, after)")
        half = states[1]
        if half.grid != grid:
            raise GridMismatch("conservation_defect needs states on one grid")
        fx = interface_fluxes(model, before, boundary, axis=0)
        fy = interface_fluxes(model, half, boundary, axis=1)
        net_out = dt * (grid.dx(1) * (fx[:, -1] - fx[:, 0]).sum()
                        + grid.dx(0) * (fy[-1, :] - fy[0, :]).sum())
    scale = max(1.0, float(np.abs(before.values).sum() * vol))
    return float(abs(mass_change + net_out)) / scale


def time_continuity(snapshots: Sequence[tuple[float, Field]],
                    sigma: float) -> float:
    """Modulus nu(u, sigma): max L1 distance over snapshot pairs within sigma."""
    nu = 0.0
    for i, (ti, fi) in enumerate(snapshots):
        for tj, fj in snapshots[i + 1:]:
            if abs(tj - ti) <= sigma:
                nu = max(nu, l1_distance(fi, fj))
    return nu


def eoc(errors: Sequence[tuple[float, float]]) -> list[float]:
    """Experimental orders log2(e_k / e_{k+1}) under mesh halving.

    ``errors`` is a list of (h, e) pairs with each h half the previous one.
    An exactly-resolved level (e <= 0) yields the sentinel order inf.
    """
    if len(errors) < 2:
        raise ValueError("eoc needs at least two mesh levels")
    orders = []
    for (h0, e0), (h1, e1) in zip(errors, errors[1:]):
        if abs(h0 / h1 - 2.0) > 1e-6:
            raise ValueError(f"mesh widths {h0} -> {h1} are not a halving")
        if e0 <= 0.0 or e1 <= 0.0:
            orders.append(math.inf)
        else:
            orders.append(math.log2(e0 / e1))
    return orders


@dataclass(frozen=True)
class DiagnosticsReport:
    """Measurements of one run, exportable with pinned JSON keys."""

    tv_u: float
    tv_beta: float
    entropy_violation: float
    conservation_defect: float
    l1_error: float | None = None
    nu: float | None = None


def report_dict(report: DiagnosticsReport, M: int, dx: float, dt: float,
                lam: float, t_end: float) -> dict:
    """The pinned ten-key JSON object describing one run."""
    return {
        "M": int(M),
        "dx": float(dx),
        "dt": float(dt),
        "lambda": float(lam),
        "t_end": float(t_end),
        "l1_error": None if report.l1_error is None else float(report.l1_error),
        "tv_u": float(report.tv_u),
        "tv_beta": float(report.tv_beta),
        "entropy_violation": float(report.entropy_violation),
        "conservation_defect": float(report.conservation_defect),
    }


def write_report(path, report: DiagnosticsReport, M: int, dx: float,
                 dt: float, lam: float, t_end: float) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(report_dict(report, M, dx, dt, lam, t_end), fh, indent=2)
        fh.write("\n")
