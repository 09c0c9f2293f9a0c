"""Uniform cell-centered meshes, cell-value fields, and boundary padding.

A Grid covers a truncated rectangular domain with equal-width cells per
axis; cell i of axis k is the half-open interval
[origin_k + i*dx_k, origin_k + (i+1)*dx_k) with center at the midpoint.
Fields hold one value per cell.  Two-dimensional value arrays are stored
row-major with x fastest: ``values[j, i]`` is the cell at (x_i, y_j).

Initial data and the spatial flux part r are point-sampled at cell centers
(not cell-averaged).  Ghost cells for a truncated domain are supplied by
:func:`pad` under one of three policies: Outflow (edge copy), Periodic
(wrap), or Dirichlet (fixed values per side).

Key components:
    Grid, Field          mesh geometry and cell values
    Outflow, Periodic, Dirichlet   boundary policies
    sample_initial, sample_r       point sampling at centers
    pad, pad_array       ghost-cell extension
    export_csv           17-significant-digit CSV dump of a field
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np

__all__ = [
    "NonFiniteSample",
    "Grid",
    "Field",
    "Outflow",
    "Periodic",
    "Dirichlet",
    "BoundaryPolicy",
    "sample_initial",
    "sample_r",
    "pad",
    "pad_array",
    "as_point_function",
    "export_csv",
]


class NonFiniteSample(ValueError):
    """A sampled function returned a non-finite value."""


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered mesh on a rectangular domain.

    Parameters
    ----------
    origin : tuple of float
        Lower-left corner, one entry per axis (x first).
    extent : tuple of float
        Domain side lengths, positive.
    cells : tuple of int
        Cell counts per axis (M_x[, M_y]).
    """

    origin: tuple[float, ...]
    extent: tuple[float, ...]
    cells: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "extent", tuple(float(v) for v in self.extent))
        object.__setattr__(self, "cells", tuple(int(v) for v in self.cells))
        if not (len(self.origin) == len(self.extent) == len(self.cells)):
            raise ValueError("origin, extent and cells must have equal length")
        if len(self.cells) not in (1, 2):
            raise ValueError("only 1- and 2-dimensional grids are supported")
        if any(m < 1 for m in self.cells):
            raise ValueError(f"cell counts must be >= 1, got {self.cells}")
        if any(e <= 0 for e in self.extent):
            raise ValueError(f"extents must be positive, got {self.extent}")

    @property
    def dim(self) -> int:
        return len(self.cells)

    def dx(self, axis: int = 0) -> float:
        """Cell width along an axis."""
        return self.extent[axis] / self.cells[axis]

    @property
    def cell_volume(self) -> float:
        return float(np.prod([self.dx(a) for a in range(self.dim)]))

    def centers(self, axis: int = 0) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        m = self.cells[axis]
        return self.origin[axis] + (np.arange(m) + 0.5) * self.dx(axis)

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays shaped like a value array.

        One dimension: ``(x,)`` of shape (M_x,).  Two dimensions:
        ``(X, Y)`` each of shape (M_y, M_x) with X[j, i] = x_i.
        """
        if self.dim == 1:
            return (self.centers(0),)
        X, Y = np.meshgrid(self.centers(0), self.centers(1))
        return X, Y

    @property
    def values_shape(self) -> tuple[int, ...]:
        return (self.cells[0],) if self.dim == 1 else (self.cells[1], self.cells[0])


@dataclass(frozen=True)
class Field:
    """Cell values on a grid at one time instant."""

    grid: Grid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.values_shape:
            raise ValueError(f"values shape {vals.shape} does not match grid "
                             f"shape {self.grid.values_shape}")
        if not np.isfinite(vals).all():
            raise NonFiniteSample("field contains non-finite values")
        object.__setattr__(self, "values", vals)

    def with_values(self, values: np.ndarray, time: float | None = None) -> "Field":
        return replace(self, values=values,
                       time=self.time if time is None else time)


@dataclass(frozen=True)
class Outflow:
    """Ghost cells copy the nearest edge cell."""


@dataclass(frozen=True)
class Periodic:
    """Ghost cells wrap around the domain."""


@dataclass(frozen=True)
class Dirichlet:
    """Ghost cells hold fixed values per side.

    left/right feed the x-axis, bottom/top the y-axis (2D only).
    """

    left: float
    right: float
    bottom: float | None = None
    top: float | None = None

    def __post_init__(self):
        for name in ("left", "right", "bottom", "top"):
            v = getattr(self, name)
            if v is not None and not np.isfinite(v):
                raise ValueError(f"Dirichlet {name} value must be finite")

    def sides(self, axis: int) -> tuple[float, float]:
        if axis == 0:
            return float(self.left), float(self.right)
        if self.bottom is None or self.top is None:
            raise ValueError("Dirichlet bottom/top values required for the y axis")
        return float(self.bottom), float(self.top)


BoundaryPolicy = Union[Outflow, Periodic, Dirichlet]


def pad_array(values: np.ndarray, policy: BoundaryPolicy, width: int,
              axis: int = -1, spatial_axis: int = 0) -> np.ndarray:
    """Extend an array by ``width`` ghost cells on both ends of one axis.

    ``spatial_axis`` selects Dirichlet side values (0 -> left/right,
    1 -> bottom/top); it is ignored by the other policies.
    """
    if width < 1:
        raise ValueError(f"pad width must be >= 1, got {width}")
    values = np.asarray(values, dtype=float)
    pw = [(0, 0)] * values.ndim
    pw[axis] = (width, width)
    if isinstance(policy, Outflow):
        return np.pad(values, pw, mode="edge")
    if isinstance(policy, Periodic):
        return np.pad(values, pw, mode="wrap")
    if isinstance(policy, Dirichlet):
        lo, hi = policy.sides(spatial_axis)
        cv = [(0.0, 0.0)] * values.ndim
        cv[axis] = (lo, hi)
        return np.pad(values, pw, mode="constant", constant_values=cv)
    raise TypeError(f"unknown boundary policy {policy!r}")


def pad(field: Field, policy: BoundaryPolicy, width: int) -> np.ndarray:
    """Ghost-extend a field's values on every axis per the policy."""
    out = field.values
    if field.grid.dim == 1:
        return pad_array(out, policy, width, axis=-1, spatial_axis=0)
    out = pad_array(out, policy, width, axis=-1, spatial_axis=0)
    out = pad_array(out, policy, width, axis=0, spatial_axis=1)
    return out


def _sample(grid: Grid, func: Callable, time: float) -> Field:
    coords = grid.meshes()
    vals = np.asarray(func(*coords), dtype=float)
    vals = np.broadcast_to(vals, grid.values_shape).copy()
    if not np.isfinite(vals).all():
        raise NonFiniteSample(f"{getattr(func, '__name__', 'function')} returned "
                              "a non-finite value at a cell center")
    return Field(grid=grid, values=vals, time=time)


def sample_initial(grid: Grid, u0: Callable) -> Field:
    """Point-sample initial data at cell centers (time 0)."""
    return _sample(grid, u0, time=0.0)


def sample_r(grid: Grid, r: Callable) -> Field:
    """Point-sample the spatial flux part r at cell centers."""
    return _sample(grid, r, time=0.0)


def as_point_function(field: Field) -> Callable:
    """The field's piecewise-constant interpolant as a point function.

    Cells are half-open on the right; points outside the domain clamp to
    the nearest cell.
    """
    grid = field.grid

    def lookup(*coords):
        idx = []
        for axis, c in enumerate(coords):
            c = np.asarray(c, dtype=float)
            i = np.floor((c - grid.origin[axis]) / grid.dx(axis)).astype(int)
            idx.append(np.clip(i, 0, grid.cells[axis] - 1))
        if grid.dim == 1:
            return field.values[idx[0]]
        return field.values[idx[1], idx[0]]

    return lookup


def export_csv(field: Field, path, beta: np.ndarray | None = None) -> None:
    """Write one CSV row per cell with 17-significant-digit values.

    Header is ``x,u``, ``x,u,beta``, ``x,y,u`` or ``x,y,u,beta`` depending
    on dimension and whether a beta array (same shape as the values) is
    supplied.  Rows iterate x fastest.
    """
    grid = field.grid
    cols: list[np.ndarray] = []
    if grid.dim == 1:
        header = "x,u"
        cols.append(grid.centers(0))
        cols.append(field.values)
    else:
        header = "x,y,u"
        X, Y = grid.meshes()
        cols.append(X.ravel())
        cols.append(Y.ravel())
        cols.append(field.values.ravel())
    if beta is not None:
        beta = np.asarray(beta, dtype=float)
        if beta.shape != field.values.shape:
            raise ValueError("beta array shape must match the field values")
        header += ",beta"
        cols.append(beta.ravel())
    with open(path, "w", encoding="ascii") as fh:
        fh.write(header + "\n")
        for row in zip(*cols):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
