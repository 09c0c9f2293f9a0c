"""Flux models of the form A_i(x, u) = g_i(beta(x, u)).

The flux of each spatial axis is a composition of a scalar profile g_i with
a spatial map beta(x, u) that is strictly increasing in u.  All spatial
roughness (jumps, accumulating discontinuities) lives in beta; g_i only needs
to be locally Lipschitz.  Interface fluxes are exact generalized Godunov
fluxes: the extremum of g over the interval spanned by the two beta values,
computed from the interval endpoints plus the critical points of g that fall
strictly inside.  No numerical optimization is involved, so monotonicity and
entropy checks are not polluted by sampling error.

Key components:
    GComponent           scalar flux profile with critical points and a
                         Lipschitz bound
    Affine2D             beta(x, u) = a*u + r(x) with a > 0
    GeneralMonotone1D    beta strictly increasing in u, bracketed by
                         increasing envelopes h1 <= beta <= h2
    FluxModel            one GComponent per axis plus a beta map
    godunov_scalar_flux  exact Godunov flux of a single g component
    BUILTIN_G            named profiles: burgers, sin, ex52_g1
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

__all__ = [
    "BracketFailure",
    "GComponent",
    "Affine2D",
    "GeneralMonotone1D",
    "BetaMap",
    "FluxModel",
    "CflConstants",
    "godunov_scalar_flux",
    "godunov_values",
    "numerical_interface_flux",
    "beta_eval",
    "beta_field_values",
    "k_alpha",
    "tol_inv",
    "cfl_constants",
    "estimate_lipschitz",
    "BUILTIN_G",
]


class BracketFailure(ValueError):
    """The envelopes h1/h2 cannot bracket the requested alpha.

    Raised by :func:`k_alpha` for a GeneralMonotone1D map; it signals an
    invalid map (alpha outside the range guaranteed by the envelopes).
    """


def estimate_lipschitz(f: Callable, bound: float, samples: int = 10_000,
                       safety: float = 1.05) -> float:
    """Sampled Lipschitz estimate of f on [-bound, bound].

    Central differences on ``samples`` points, inflated by ``safety``.
    Used as a fallback when no exact bound is supplied.
    """
    bound = abs(float(bound))
    if bound == 0.0:
        return 0.0
    z = np.linspace(-bound, bound, samples)
    h = z[1] - z[0]
    slopes = np.abs(np.asarray(f(z + h), dtype=float)
                    - np.asarray(f(z - h), dtype=float)) / (2.0 * h)
    return float(slopes.max() * safety)


@dataclass(frozen=True)
class GComponent:
    """One scalar flux profile g with exact extremum structure.

    Parameters
    ----------
    eval : callable
        Vectorized z -> g(z).
    critical_points : sequence of float, or callable
        Interior local-extremum locations of g, sorted ascending.  For
        unbounded families (sin) a callable ``(lo, hi) -> points`` that
        enumerates the critical points strictly inside (lo, hi).
    lipschitz_on : callable, optional
        M -> Lipschitz bound of g on [-M, M].  When omitted, a sampled
        estimate is used (see :func:`estimate_lipschitz`).
    name : str
        Display name; builtin profiles use their registry key.
    """

    eval: Callable
    critical_points: Union[Sequence[float], Callable] = ()
    lipschitz_on: Callable[[float], float] | None = None
    name: str = ""

    def crit_in(self, lo: float, hi: float) -> np.ndarray:
        """Critical points strictly inside (lo, hi), ascending."""
        if callable(self.critical_points):
            pts = np.asarray(self.critical_points(lo, hi), dtype=float)
        else:
            pts = np.asarray(self.critical_points, dtype=float)
        if pts.size == 0:
            return pts
        return pts[(lo < pts) & (pts < hi)]

    def lipschitz(self, bound: float) -> float:
        """Lipschitz bound of g on [-bound, bound]."""
        if self.lipschitz_on is not None:
            return float(self.lipschitz_on(bound))
        return estimate_lipschitz(self.eval, bound)


@dataclass(frozen=True)
class Affine2D:
    """beta(x, u) = a*u + r(x) with a > 0.

    The spatial part r may be any callable of the cell-center coordinates
    (one or two positional arrays); r carries the total variation of the
    flux in space.  Supports one- and two-dimensional domains.
    """

    a: float
    r: Callable
    tv_r: float | None = None

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"affine beta requires a > 0, got a={self.a}")


@dataclass(frozen=True)
class GeneralMonotone1D:
    """beta(x, u) strictly increasing in u, for one-dimensional domains.

    Parameters
    ----------
    eval : callable
        Vectorized (x, u) -> beta(x, u).
    h1, h2 : callable
        Strictly increasing envelopes with h1(u) <= beta(x, u) <= h2(u) for
        every x; used only to bracket inversions.
    k3 : float
        Lower modulus: |beta(x, u) - beta(x, v)| >= k3 * |u - v|.
    lipschitz_u : callable, optional
        M -> Lipschitz bound of u -> beta(x, u) on [-M, M], uniform in x.
        When omitted, a sampled central-difference estimate is used.
    """

    eval: Callable
    h1: Callable
    h2: Callable
    k3: float
    lipschitz_u: Callable[[float], float] | None = None

    def __post_init__(self):
        if not self.k3 > 0:
            raise ValueError(f"lower modulus k3 must be positive, got {self.k3}")


BetaMap = Union[Affine2D, GeneralMonotone1D]


@dataclass(frozen=True)
class FluxModel:
    """A flux A_i(x, u) = g_i(beta(x, u)) per spatial axis.

    ``components[k]`` is the profile of axis k (0 = x, 1 = y); the number of
    components fixes the spatial dimension.  GeneralMonotone1D maps are
    restricted to one dimension; Affine2D works in both.
    """

    components: tuple[GComponent, ...]
    beta: BetaMap

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) not in (1, 2):
            raise ValueError("FluxModel supports 1 or 2 spatial dimensions, "
                             f"got {len(self.components)} components")
        if isinstance(self.beta, GeneralMonotone1D) and len(self.components) != 1:
            raise ValueError("GeneralMonotone1D beta maps are one-dimensional")

    @property
    def dim(self) -> int:
        return len(self.components)


def _spatial(func: Callable, x) -> np.ndarray:
    """Evaluate a spatial callable at a point or a tuple of coordinates."""
    if isinstance(x, tuple):
        return np.asarray(func(*x), dtype=float)
    return np.asarray(func(x), dtype=float)


def beta_eval(beta: BetaMap, x, u) -> np.ndarray | float:
    """Evaluate beta(x, u).

    ``x`` is a coordinate (or array of coordinates); for two-dimensional
    affine maps pass a tuple ``(x, y)``.  Scalars in, scalar out.
    """
    u_arr = np.asarray(u, dtype=float)
    if isinstance(beta, Affine2D):
        out = beta.a * u_arr + _spatial(beta.r, x)
    else:
        out = np.asarray(beta.eval(x, u_arr), dtype=float)
    if np.ndim(out) == 0 and np.ndim(u) == 0:
        return float(out)
    return out


def beta_field_values(beta: BetaMap, grid, values: np.ndarray) -> np.ndarray:
    """beta evaluated at every cell center of a grid against cell values."""
    coords = grid.meshes()
    x = coords if len(coords) > 1 else coords[0]
    return np.asarray(beta_eval(beta, x, values), dtype=float)


def tol_inv(alpha: float) -> float:
    """Inversion tolerance for k_alpha bisection."""
    return 1e-12 * max(1.0, abs(alpha))


def k_alpha(beta: BetaMap, x, alpha: float) -> np.ndarray | float:
    """The steady-state value u with beta(x, u) = alpha.

    Affine maps invert in closed form, (alpha - r(x)) / a.  General monotone
    maps bisect to :func:`tol_inv` precision inside a bracket grown from the
    envelopes h1, h2.

    Raises
    ------
    BracketFailure
        If the envelopes cannot bracket alpha (invalid map).
    """
    if isinstance(beta, Affine2D):
        out = (alpha - _spatial(beta.r, x)) / beta.a
        return float(out) if np.ndim(out) == 0 else out

    # Grow a bracket: h1 <= beta <= h2 and both increase, so
    # h1(hi) >= alpha forces beta(x, hi) >= alpha and h2(lo) <= alpha forces
    # beta(x, lo) <= alpha.
    scalar = np.ndim(x) == 0
    x_arr = np.asarray(x, dtype=float)
    size = 1.0
    while float(beta.h1(size)) < alpha or float(beta.h2(-size)) > alpha:
        size *= 2.0
        if size > 2.0 ** 60:
            raise BracketFailure(
                f"envelopes h1/h2 cannot bracket alpha={alpha}")
    lo = np.full(x_arr.shape, -size)
    hi = np.full(x_arr.shape, size)
    tol = tol_inv(alpha)
    # Bisection halves the bracket each pass; 2*size / 2^n < tol fixes n.
    n_iter = max(1, int(math.ceil(math.log2(max(2.0 * size / tol, 2.0)))))
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        below = np.asarray(beta.eval(x_arr, mid), dtype=float) < alpha
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    return float(out) if scalar else out


def godunov_values(g: GComponent, p, q) -> np.ndarray:
    """Vectorized exact Godunov flux of g for arrays of interface pairs.

    Returns min of g over [p, q] where p <= q and max of g over [q, p]
    where p >= q, elementwise.  The extremum is the best of g at the two
    endpoints and at every critical point strictly inside the interval.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    gp = np.asarray(g.eval(p), dtype=float)
    gq = np.asarray(g.eval(q), dtype=float)
    lo = np.minimum(p, q)
    hi = np.maximum(p, q)
    vmin = np.minimum(gp, gq)
    vmax = np.maximum(gp, gq)
    if lo.size:
        for c in g.crit_in(float(lo.min()), float(hi.max())):
            inside = (lo < c) & (c < hi)
            if not inside.any():
                continue
            gc = float(g.eval(c))
            vmin = np.where(inside, np.minimum(vmin, gc), vmin)
            vmax = np.where(inside, np.maximum(vmax, gc), vmax)
    return np.where(p <= q, vmin, vmax)


def godunov_scalar_flux(g: GComponent, p: float, q: float) -> float:
    """Exact Godunov flux of g for one interface pair (p, q)."""
    return float(godunov_values(g, p, q))


def numerical_interface_flux(model: FluxModel, axis: int, u: float, v: float,
                             xL, xR) -> float:
    """Interface flux between adjacent cells centered at xL and xR.

    Equals the Godunov flux of g_axis applied to (beta(xL, u), beta(xR, v)).
    """
    g = model.components[axis]
    return godunov_scalar_flux(g, beta_eval(model.beta, xL, u),
                               beta_eval(model.beta, xR, v))


@dataclass(frozen=True)
class CflConstants:
    """Constants entering the time-step bound lambda * L_g * L_beta <= 1/2."""

    S: float
    L_beta: float
    L_g: tuple[float, ...]


def cfl_constants(model: FluxModel, Mbound: float, grid=None) -> CflConstants:
    """Bound S on |beta|, L_beta, and per-axis L_g for |u| <= Mbound.

    For affine maps S = a*Mbound + max|r| over the grid cell centers (exact);
    for general monotone maps both S and L_beta are sampled over the centers.
    A grid is required so that the spatial sup is taken where the scheme
    actually evaluates beta.
    """
    Mbound = float(Mbound)
    if not (np.isfinite(Mbound) and Mbound >= 0):
        raise ValueError(f"Mbound must be finite and nonnegative, got {Mbound}")
    beta = model.beta
    if isinstance(beta, Affine2D):
        if grid is None:
            raise ValueError("cfl_constants needs a grid to sample r")
        coords = grid.meshes()
        x = coords if len(coords) > 1 else coords[0]
        r_vals = np.broadcast_to(_spatial(beta.r, x), coords[0].shape)
        S = beta.a * Mbound + float(np.abs(r_vals).max())
        L_beta = beta.a
    else:
        if grid is None:
            raise ValueError("cfl_constants needs a grid to sample beta")
        x = grid.meshes()[0]
        u_grid = np.linspace(-Mbound, Mbound, 4097)
        vals = np.asarray(beta.eval(x[:, None], u_grid[None, :]), dtype=float)
        S = float(np.abs(vals).max())
        if beta.lipschitz_u is not None:
            L_beta = float(beta.lipschitz_u(Mbound))
        else:
            du = u_grid[1] - u_grid[0]
            slopes = np.abs(vals[:, 2:] - vals[:, :-2]) / (2.0 * du)
            L_beta = float(slopes.max())
    L_g = tuple(comp.lipschitz(S) for comp in model.components)
    return CflConstants(S=float(S), L_beta=float(L_beta), L_g=L_g)


def _burgers_eval(z):
    return np.square(np.asarray(z, dtype=float)) / 2.0


def _sin_critical(lo: float, hi: float) -> np.ndarray:
    """Points pi/2 + k*pi strictly inside (lo, hi)."""
    k_lo = math.floor((lo - math.pi / 2.0) / math.pi)
    k_hi = math.ceil((hi - math.pi / 2.0) / math.pi)
    pts = math.pi / 2.0 + math.pi * np.arange(k_lo, k_hi + 1)
    return pts[(lo < pts) & (pts < hi)]


def _ex52_g1_eval(z):
    z = np.asarray(z, dtype=float)
    return np.where(z < -1.0, -z - 1.0, np.where(z < 0.0, 0.0, z))


BUILTIN_G: dict[str, GComponent] = {
    "burgers": GComponent(eval=_burgers_eval, critical_points=(0.0,),
                          lipschitz_on=lambda M: abs(float(M)), name="burgers"),
    "sin": GComponent(eval=np.sin, critical_points=_sin_critical,
                      lipschitz_on=lambda M: 1.0, name="sin"),
    # Monotone ramp with a flat segment on [-1, 0]: -z-1 below, z above.
    "ex52_g1": GComponent(eval=_ex52_g1_eval, critical_points=(-1.0, 0.0),
                          lipschitz_on=lambda M: 1.0, name="ex52_g1"),
}
