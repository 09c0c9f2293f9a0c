"""Command-line front end.

Three subcommands:

    run          one solve; prints `t_end l1_error tv_u tv_beta
                 entropy_violation` and optionally writes solution.csv
                 plus report.json
    convergence  a mesh ladder; prints the table and the minimum EOC,
                 optionally writing table.csv and table.txt
    invariants   the randomized property suite; exit 1 on any failure

Settings come from an optional JSON config file plus flags; flags win.
Exit codes: 0 success, 1 invariant failure, 2 configuration error (the
message names the offending key), 3 solver error (CFL violation, bracket
failure, non-finite data, degenerate flux).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from .diagnostics import (
    DiagnosticsReport,
    entropy_residual,
    conservation_defect,
    l1_distance,
    sample_alphas,
    tv_1d,
    tv_2d,
    tv_of_beta,
    write_report,
)
from .experiments import (
    AccumulatingStep,
    ExperimentSpec,
    PROBLEMS,
    restrict_1d,
    run_1d_reference,
    run_convergence,
)
from .flux_model import (
    BUILTIN_G,
    Affine2D,
    BracketFailure,
    FluxModel,
    beta_field_values,
)
from .grid import Field, NonFiniteSample, Outflow, export_csv, sample_initial
from .invariants import run_all
from .solver import (
    CflViolation,
    DegenerateFlux,
    SolverConfig,
    estimate_bounds,
    run,
    select_dt,
    step_1d,
    step_2d_parts,
)

__all__ = ["ConfigError", "parse_config", "serialize_config", "main"]

_TOP_KEYS = {"problem", "mesh", "cfl_fraction", "t_end", "dim", "seed",
             "out_dir", "trials", "custom"}
_CUSTOM_KEYS = {"g1", "g2", "a", "r_csv", "u0", "origin", "extent"}


class ConfigError(ValueError):
    """A setting is missing, unknown, or out of range."""


def parse_config(path) -> dict:
    """Load and key-validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    for key in data:
        if key not in _TOP_KEYS:
            raise ConfigError(f"unknown config key '{key}'")
    custom = data.get("custom", {})
    if custom is not None and not isinstance(custom, dict):
        raise ConfigError("config key 'custom' must be an object")
    for key in custom or {}:
        if key not in _CUSTOM_KEYS:
            raise ConfigError(f"unknown config key 'custom.{key}'")
    return data


def serialize_config(settings: dict) -> str:
    """Canonical JSON form; serialize(parse(file)) is idempotent."""
    return json.dumps(settings, indent=2, sort_keys=True) + "\n"


def _fail(key: str, detail: str):
    raise ConfigError(f"{key}: {detail}")


def _as_float(settings, key, default=None):
    value = settings.get(key, default)
    if value is None:
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        _fail(key, f"must be a number, got {value!r}")


def _as_int(settings, key, default=None):
    value = settings.get(key, default)
    if value is None:
        return None
    try:
        if isinstance(value, float) and value != int(value):
            raise ValueError
        return int(value)
    except (TypeError, ValueError):
        _fail(key, f"must be an integer, got {value!r}")


def _as_pair(value, key):
    if isinstance(value, str):
        parts = value.split(",")
    else:
        parts = list(value)
    if len(parts) != 2:
        _fail(key, f"must be two comma-separated numbers, got {value!r}")
    try:
        return tuple(float(v) for v in parts)
    except (TypeError, ValueError):
        _fail(key, f"must be two numbers, got {value!r}")


def _mesh_list(value):
    if value is None:
        return None
    if isinstance(value, (int, float)):
        value = [value]
    elif isinstance(value, str):
        value = value.split(",")
    try:
        meshes = tuple(int(v) for v in value)
    except (TypeError, ValueError):
        _fail("mesh", f"must be integers, got {value!r}")
    for m in meshes:
        if m < 4:
            _fail("mesh", f"must be at least 4 per axis, got {m}")
    return meshes


def _load_r_csv(path) -> AccumulatingStep:
    """Two-column CSV (breakpoint, value); the first value extends left.

    Row k's value applies on [breakpoint_k, breakpoint_{k+1}), half-open;
    the last value continues to the right.
    """
    try:
        table = np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        _fail("custom.r_csv", f"cannot read two-column CSV {path}: {exc}")
    if table.shape[1] != 2 or table.shape[0] < 1:
        _fail("custom.r_csv", f"{path} must have rows of (breakpoint, value)")
    breaks, values = table[:, 0], table[:, 1]
    if not (np.diff(breaks) > 0).all():
        _fail("custom.r_csv", f"{path} breakpoints must increase strictly")
    full_values = np.concatenate([values[:1], values])
    return AccumulatingStep(breaks, full_values, a_inf=float(breaks[-1]))


def _build_custom(settings, dim):
    custom = settings.get("custom") or {}
    g1_name = custom.get("g1", "burgers")
    g2_name = custom.get("g2", "sin")
    for key, name in (("custom.g1", g1_name), ("custom.g2", g2_name)):
        if name not in BUILTIN_G:
            _fail(key, f"unknown flux profile {name!r}; "
                       f"choose from {sorted(BUILTIN_G)}")
    a = _as_float(custom, "a", 1.0)
    if not a > 0:
        _fail("custom.a", f"must be positive, got {a}")
    if "r_csv" in custom:
        r = _load_r_csv(custom["r_csv"])
        tv_r = r.tv()
    else:
        def r(x, y=None):
            return np.zeros(np.shape(np.asarray(x, dtype=float)))
        tv_r = 0.0
    u0_const = _as_float(custom, "u0", 0.0)
    origin = _as_pair(custom.get("origin", (0.0, 0.0)), "custom.origin")
    extent = _as_pair(custom.get("extent", (6.0, 6.0)), "custom.extent")
    if not all(e > 0 for e in extent):
        _fail("custom.extent", f"must be positive, got {extent}")

    comps = (BUILTIN_G[g1_name],) if dim == 1 else (BUILTIN_G[g1_name],
                                                    BUILTIN_G[g2_name])
    model = FluxModel(components=comps,
                      beta=Affine2D(a=a, r=r, tv_r=tv_r))

    def u0(x, y=None):
        return np.full(np.shape(np.asarray(x, dtype=float)), u0_const)

    spec = ExperimentSpec(name="custom", t_end=1.0,
                          origin=origin, extent=extent)
    return model, u0, None, spec


def _build_problem(settings, dim):
    """Resolve (model, u0, exact, spec) with overrides applied.

    The model is returned at the requested dimension.
    """
    name = settings.get("problem")
    if name is None:
        _fail("problem", "is required (ex51, ex52, steady, or custom)")
    if name == "custom":
        model, u0, exact, spec = _build_custom(settings, dim)
    elif name in PROBLEMS:
        model, u0, exact, spec = PROBLEMS[name]()
        if dim == 1:
            model = restrict_1d(model)
    else:
        _fail("problem", f"unknown problem {name!r}; "
                         f"choose from {sorted(PROBLEMS) + ['custom']}")
    replacements = {}
    t_end = _as_float(settings, "t_end")
    if t_end is not None:
        if t_end < 0:
            _fail("t_end", f"must be nonnegative, got {t_end}")
        # ExperimentSpec insists on a positive horizon; keep zero runs
        # representable by leaving its t_end alone and handling 0 in cmd_run.
        replacements["t_end"] = t_end if t_end > 0 else spec.t_end
    fraction = _as_float(settings, "cfl_fraction")
    if fraction is not None:
        if not fraction > 0:
            _fail("cfl_fraction", f"must be positive, got {fraction}")
        replacements["cfl_fraction"] = fraction
    if replacements:
        spec = dataclasses.replace(spec, **replacements)
    return model, u0, exact, spec, (0.0 if t_end == 0 else spec.t_end)


def _gather(args) -> dict:
    settings = parse_config(args.config) if args.config else {}
    for key in ("problem", "mesh", "cfl_fraction", "t_end", "dim", "seed",
                "out_dir", "trials"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    custom = dict(settings.get("custom") or {})
    for flag, key in (("g1", "g1"), ("g2", "g2"), ("a", "a"),
                      ("r_csv", "r_csv"), ("u0_const", "u0"),
                      ("origin", "origin"), ("extent", "extent")):
        value = getattr(args, flag, None)
        if value is not None:
            custom[key] = value
    if custom:
        settings["custom"] = custom
    return settings


def _g17(value) -> str:
    return "nan" if value is None else f"{float(value):.17g}"


class _Trail:
    """Observer keeping the last two observed fields."""

    def __init__(self):
        self.prev = None
        self.last = None

    def __call__(self, n, t, field):
        self.prev, self.last = self.last, field


def _final_step_diagnostics(model, before, after, dt, bounds, boundary):
    """Entropy violation and conservation defect of the final step.

    The step is redone from the stored penultimate state (bitwise the same
    arithmetic) so the half state is available in 2D.
    """
    alphas = sample_alphas(bounds)
    config = SolverConfig(boundary=boundary, dt=dt, bounds=bounds)
    if before.grid.dim == 1:
        redone = step_1d(model, before, config)
        residual = entropy_residual(model, before, redone, dt, alphas,
                                    axis=0, boundary=boundary)
        defect = conservation_defect(model, (before, redone), dt, boundary)
    else:
        half, redone = step_2d_parts(model, before, config)
        residual = max(
            entropy_residual(model, before, half, dt, alphas,
                             axis=0, boundary=boundary),
            entropy_residual(model, half, redone, dt, alphas,
                             axis=1, boundary=boundary))
        defect = conservation_defect(model, (before, half, redone), dt,
                                     boundary)
    return max(0.0, residual), defect


def cmd_run(args) -> int:
    settings = _gather(args)
    meshes = _mesh_list(settings.get("mesh"))
    M = meshes[0] if meshes else 100
    if meshes and len(meshes) > 1:
        _fail("mesh", "run takes a single mesh size")
    dim = _as_int(settings, "dim", 2)
    if dim not in (1, 2):
        _fail("dim", f"must be 1 or 2, got {dim}")
    model, u0, exact, spec, t_end = _build_problem(settings, dim)

    grid = spec.grid(M, dim)
    u0field = sample_initial(grid, u0)
    boundary = Outflow()
    bounds = estimate_bounds(model, u0field)
    if t_end > 0:
        dt0 = select_dt(model, grid, bounds, cfl_fraction=spec.cfl_fraction,
                        t_end=t_end)
    else:
        dt0 = 0.0
    config = SolverConfig(t_end=t_end, boundary=boundary,
                          cfl_fraction=spec.cfl_fraction, bounds=bounds)
    trail = _Trail()
    final = run(model, u0field, config, observers=(trail,))

    if t_end > 0:
        before = trail.prev if trail.prev is not None else u0field
        entropy_violation, defect = _final_step_diagnostics(
            model, before, final, final.time - before.time, bounds, boundary)
    else:
        entropy_violation, defect = 0.0, 0.0
    tvu = tv_1d(final.values) if dim == 1 else tv_2d(final)
    tvb = tv_of_beta(model, final)
    err = None
    if exact is not None:
        err = l1_distance(final, lambda *coords: exact(t_end, *coords))

    out_dir = settings.get("out_dir")
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        beta_vals = beta_field_values(model.beta, grid, final.values)
        export_csv(final, os.path.join(out_dir, "solution.csv"),
                   beta=beta_vals)
        report = DiagnosticsReport(tv_u=tvu, tv_beta=tvb,
                                   entropy_violation=entropy_violation,
                                   conservation_defect=defect,
                                   l1_error=err)
        write_report(os.path.join(out_dir, "report.json"), report,
                     M=M, dx=grid.dx(0), dt=dt0, lam=dt0 / grid.dx(0),
                     t_end=t_end)
    print(" ".join([_g17(t_end), _g17(err), _g17(tvu), _g17(tvb),
                    _g17(entropy_violation)]))
    return 0


def cmd_convergence(args) -> int:
    settings = _gather(args)
    dim = _as_int(settings, "dim", 2)
    if dim not in (1, 2):
        _fail("dim", f"must be 1 or 2, got {dim}")
    model, u0, exact, spec, t_end = _build_problem(settings, dim)
    if t_end <= 0:
        _fail("t_end", "convergence studies need t_end > 0")
    meshes = _mesh_list(settings.get("mesh")) or spec.meshes
    if len(meshes) < 2:
        _fail("mesh", "convergence studies need at least two mesh sizes")
    if not all(a < b for a, b in zip(meshes, meshes[1:])):
        _fail("mesh", f"sizes must increase strictly, got {meshes}")

    if dim == 1:
        table = run_1d_reference(model, u0, spec, exact=exact, meshes=meshes)
    else:
        table = run_convergence(model, u0, spec, exact=exact, meshes=meshes)

    text = table.to_text()
    print(text, end="")
    min_order = table.min_order()
    if min_order is None:
        print("min EOC = unavailable (no exact solution)")
    elif min_order == float("inf"):
        print("min EOC = resolved (errors are exactly zero)")
    else:
        print(f"min EOC = {min_order:.6g}")
    out_dir = settings.get("out_dir")
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        table.to_csv(os.path.join(out_dir, "table.csv"))
        with open(os.path.join(out_dir, "table.txt"), "w",
                  encoding="ascii") as fh:
            fh.write(text)
    return 0


def cmd_invariants(args) -> int:
    settings = _gather(args)
    seed = _as_int(settings, "seed", 1729)
    trials = _as_int(settings, "trials", 200)
    if trials < 1:
        _fail("trials", f"must be >= 1, got {trials}")
    results = run_all(seed=seed, trials=trials)
    failures = 0
    for result in results:
        print(f"{result.name}: {result.trials} trials, "
              f"{result.failures} failures, "
              f"worst margin {result.worst_margin:.3e}")
        if result.witness is not None:
            print(f"  witness: {result.witness}")
        failures += result.failures
    if failures:
        print(f"invariant failures: {failures}")
        return 1
    print("all invariants passed")
    return 0


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--problem",
                        help="ex51, ex52, steady, or custom")
    parser.add_argument("--mesh",
                        help="cells per axis; comma list for convergence")
    parser.add_argument("--cfl-fraction", dest="cfl_fraction", type=float,
                        help="fraction of the stable time step (default 1.0)")
    parser.add_argument("--t-end", dest="t_end", type=float,
                        help="final time (default: problem specific)")
    parser.add_argument("--out-dir", dest="out_dir",
                        help="directory for artifacts")
    parser.add_argument("--seed", type=int, help="randomized-suite seed")
    parser.add_argument("--dim", type=int, choices=(1, 2),
                        help="spatial dimension (default 2)")
    parser.add_argument("--g1", help="custom: x-axis flux profile name")
    parser.add_argument("--g2", help="custom: y-axis flux profile name")
    parser.add_argument("--a", type=float, help="custom: beta slope a > 0")
    parser.add_argument("--r-csv", dest="r_csv",
                        help="custom: two-column CSV of (breakpoint, value)")
    parser.add_argument("--u0-const", dest="u0_const", type=float,
                        help="custom: constant initial value")
    parser.add_argument("--origin", help="custom: domain origin 'x0,y0'")
    parser.add_argument("--extent", help="custom: domain extent 'Lx,Ly'")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="panov-fv",
        description="Godunov finite-volume solver for fluxes g(beta(x, u)) "
                    "with accumulating spatial discontinuities")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="single solve with artifacts")
    p_con = sub.add_parser("convergence", help="mesh-ladder study")
    p_inv = sub.add_parser("invariants", help="randomized property suite")
    p_inv.add_argument("--trials", type=int, help="trials per property")
    for p in (p_run, p_con, p_inv):
        _add_common(p)
    args = parser.parse_args(argv)
    handler = {"run": cmd_run, "convergence": cmd_convergence,
               "invariants": cmd_invariants}[args.command]
    try:
        return handler(args)
    except (CflViolation, DegenerateFlux, BracketFailure,
            NonFiniteSample) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
