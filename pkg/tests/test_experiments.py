"""Tests for the benchmark problems, their exact solutions, and drivers."""

import math
import os

import numpy as np
import pytest

from panov_fv import (
    AccumulatingStep,
    Affine2D,
    DimensionalityMismatch,
    ExperimentSpec,
    FluxModel,
    PROBLEMS,
    SolverConfig,
    estimate_bounds,
    make_ex51,
    make_ex52,
    make_steady,
    restrict_1d,
    run,
    run_1d_reference,
    run_convergence,
    sample_initial,
    select_dt,
    time_continuity,
)
from panov_fv.experiments import worker_count

from _helpers import identity_model


class TestAccumulatingStep:
    def test_half_open_lookup(self):
        step = AccumulatingStep(breakpoints=[1.0, 2.0],
                                values=[10.0, 20.0, 30.0], a_inf=2.0)
        assert step(0.0) == 10.0
        assert step(1.0) == 20.0
        assert step(1.999) == 20.0
        assert step(2.0) == 30.0

    def test_vectorized_lookup(self):
        step = AccumulatingStep(breakpoints=[0.5],
                                values=[1.0, -1.0], a_inf=0.5)
        got = step(np.array([0.0, 0.5, 1.0]))
        assert np.array_equal(got, [1.0, -1.0, -1.0])

    def test_total_variation(self):
        step = AccumulatingStep(breakpoints=[1.0, 2.0],
                                values=[0.0, 3.0, 1.0], a_inf=2.0)
        assert step.tv() == 5.0

    def test_breakpoints_must_increase(self):
        with pytest.raises(ValueError):
            AccumulatingStep(breakpoints=[1.0, 1.0],
                             values=[0.0, 1.0, 2.0], a_inf=1.0)

    def test_value_count_checked(self):
        with pytest.raises(ValueError):
            AccumulatingStep(breakpoints=[1.0], values=[0.0], a_inf=1.0)


class TestExperimentSpec:
    def test_grid_construction(self):
        spec = ExperimentSpec(name="demo", t_end=1.0)
        g2 = spec.grid(50, 2)
        assert g2.dim == 2 and g2.dx(0) == 0.12
        g1 = spec.grid(50, 1)
        assert g1.dim == 1

    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentSpec(name="demo", t_end=0.0)
        with pytest.raises(ValueError):
            ExperimentSpec(name="demo", t_end=1.0, meshes=(100, 50))


class TestEx51:
    def test_sequence_values(self):
        # Frozen oracle: a_2 = 1.8, a_3 = 2.6, a_4 = 3.112.
        _, _, _, spec = make_ex51()
        model, u0, exact, spec = make_ex51()
        breaks = model.beta.r.breakpoints
        assert breaks[0] == 1.0
        assert breaks[1] == pytest.approx(1.8, abs=1e-14)
        assert breaks[2] == pytest.approx(2.6, abs=1e-14)
        assert breaks[3] == pytest.approx(3.112, abs=1e-14)

    def test_truncation_count(self):
        # Frozen oracle: plateaus below 1e-14 start at n = 152.
        model, _, _, _ = make_ex51()
        assert model.beta.r.breakpoints.size == 152

    def test_accumulation_point(self):
        # Frozen oracle: the truncated sum agrees with a_inf = 49/9.
        model, _, _, _ = make_ex51()
        r = model.beta.r
        assert r.a_inf == pytest.approx(49.0 / 9.0, abs=1e-15)
        assert abs(r.breakpoints[-1] - r.a_inf) <= 1e-13

    def test_staircase_plateau_values(self):
        model, u0, _, _ = make_ex51()
        assert model.beta.r(0.5) == 4.0
        assert u0(0.5) == -3.2

    def test_exact_solution_regions(self):
        _, u0, exact, _ = make_ex51()
        assert exact(1.0, 0.5) == -3.2
        assert exact(1.0, 5.9) == 0.0
        xs = np.linspace(0.0, 6.0, 701)
        assert np.array_equal(exact(0.0, xs), np.asarray(u0(xs)))

    def test_exact_beta_transform_continuous_at_fan_centers(self):
        # beta = u + r is continuous across odd-indexed breakpoints (fan
        # centers); crossing jumps live at even-indexed breakpoints where
        # |beta| is preserved, keeping the flux single-valued.
        model, _, exact, _ = make_ex51()
        r = model.beta.r
        breaks = r.breakpoints
        g1 = model.components[0]

        def beta_at(x):
            return exact(1.0, x) + r(x)

        for n in range(1, 40):
            a_n = breaks[n]
            left = beta_at(np.nextafter(a_n, -np.inf))
            right = beta_at(a_n)
            if (n + 1) % 2 == 1:
                assert abs(left - right) <= 1e-12
            else:
                assert abs(abs(left) - abs(right)) <= 1e-12
                fl = float(np.asarray(g1.eval(left)))
                fr = float(np.asarray(g1.eval(right)))
                assert abs(fl - fr) <= 1e-12

    def test_protocol(self):
        _, _, _, spec = make_ex51()
        assert spec.t_end == 1.0
        assert spec.meshes == (50, 100, 200, 400)
        assert spec.cfl_fraction == 0.8


class TestEx52:
    def test_sequence_values(self):
        # Frozen oracle: a_2 = 1.7999999999999994, r_2 = 0.3599999999999999
        # (scalar arithmetic; the vectorized power differs by 2 ulp).
        model, _, _, _ = make_ex52()
        r = model.beta.r
        assert r.breakpoints[1] == pytest.approx(1.7999999999999994, abs=5e-15)
        assert r(r.breakpoints[1]) == pytest.approx(0.3599999999999999,
                                                    abs=5e-15)

    def test_truncation_count(self):
        # Frozen oracle: 144 kept plateaus plus the final breakpoint at 5.
        model, _, _, _ = make_ex52()
        assert model.beta.r.breakpoints.size == 145
        assert model.beta.r.breakpoints[-1] == 5.0

    def test_staircase_plateau_values(self):
        model, u0, _, _ = make_ex52()
        assert model.beta.r(0.5) == 2.0
        assert model.beta.r(5.5) == 1.0
        assert u0(0.5) == 2.0

    def test_exact_solution_is_shifted_staircase_transport(self):
        model, u0, exact, _ = make_ex52()
        r = model.beta.r
        xs = np.linspace(0.0, 6.0, 701)
        assert np.array_equal(exact(0.0, xs), np.full(701, 2.0))
        t = 1.25
        want = 2.0 + r(xs - t) - r(xs)
        assert np.array_equal(exact(t, xs), want)
        # Once every shifted jump has left the domain the state is the
        # steady profile 4 - r(x).
        assert np.array_equal(exact(6.0, xs), 4.0 - np.asarray(r(xs)))

    def test_exact_is_y_independent(self):
        _, _, exact, _ = make_ex52()
        xs = np.linspace(0.0, 6.0, 31)
        assert np.array_equal(exact(2.0, xs, np.zeros(31)),
                              exact(2.0, xs, np.full(31, 6.0)))

    def test_protocol(self):
        _, _, _, spec = make_ex52()
        assert spec.t_end == 6.0
        assert spec.cfl_fraction == 0.8


class TestSteady:
    def test_nothing_moves(self):
        model, u0, exact, spec = make_steady()
        table = run_convergence(model, u0, spec, exact=exact, meshes=(8, 16))
        assert table.errors == (0.0, 0.0)
        assert table.orders == (math.inf,)
        assert table.min_order() == math.inf


class TestDrivers:
    def test_registry(self):
        assert set(PROBLEMS) == {"ex51", "ex52", "steady"}

    def test_restrict_1d(self):
        model, _, _, _ = make_ex52()
        m1 = restrict_1d(model)
        assert m1.dim == 1
        assert m1.components[0] is model.components[0]
        assert m1.beta is model.beta

    def test_convergence_table_rows_and_csv(self, tmp_path):
        model, u0, exact, spec = make_ex52()
        table = run_convergence(model, u0, spec, exact=exact,
                                meshes=(8, 16), cfl_fraction=0.8)
        assert table.meshes == (8, 16)
        assert len(table.errors) == 2
        assert table.orders is not None and len(table.orders) == 1
        path = tmp_path / "table.csv"
        table.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "M,e,tv_u,tv_beta,eoc"
        assert lines[1].endswith(",")
        text = table.to_text()
        assert text.splitlines()[0].split() == ["M", "e", "tv_u", "tv_beta",
                                                "eoc"]

    def test_mesh_levels_independent_of_pool_size(self, monkeypatch):
        model, u0, exact, spec = make_ex52()
        monkeypatch.setenv("PANOV_FV_THREADS", "1")
        serial = run_convergence(model, u0, spec, exact=exact, meshes=(8, 16))
        monkeypatch.setenv("PANOV_FV_THREADS", "4")
        pooled = run_convergence(model, u0, spec, exact=exact, meshes=(8, 16))
        assert serial.errors == pooled.errors
        assert serial.tv_beta == pooled.tv_beta

    def test_worker_count_env_and_default(self, monkeypatch):
        monkeypatch.delenv("PANOV_FV_THREADS", raising=False)
        assert 1 <= worker_count(3) <= 3
        monkeypatch.setenv("PANOV_FV_THREADS", "2")
        assert worker_count(8) == 2
        monkeypatch.setenv("PANOV_FV_THREADS", "0")
        with pytest.raises(ValueError):
            worker_count(8)

    def test_1d_reference_rejects_y_dependent_beta(self):
        model = FluxModel(
            components=identity_model(("burgers", "sin")).components,
            beta=Affine2D(a=1.0, r=lambda x, y: np.asarray(y), tv_r=None))
        spec = ExperimentSpec(name="demo", t_end=0.1)
        with pytest.raises(DimensionalityMismatch):
            run_1d_reference(model, lambda x, y=None: np.zeros(np.shape(x)),
                             spec, meshes=(8, 16))

    def test_1d_reference_runs_ex52(self):
        model, u0, exact, spec = make_ex52()
        table = run_1d_reference(model, u0, spec, exact=exact, meshes=(8, 16))
        assert table.dim == 1
        assert all(e > 0 for e in table.errors)


class TestTimeContinuityModulus:
    @pytest.mark.parametrize("M", [50, 100])
    def test_nu_scales_like_sqrt_dt(self, M):
        # Measured bound: nu(u, sqrt(dt)) / sqrt(dt) stays near 4.2 across
        # meshes for the rarefaction problem; 6.0 gives honest headroom
        # while excluding unbounded growth.
        model, u0, _, spec = make_ex51()
        grid = spec.grid(M, 2)
        f0 = sample_initial(grid, u0)
        bounds = estimate_bounds(model, f0)
        dt = select_dt(model, grid, bounds,
                       cfl_fraction=spec.cfl_fraction, t_end=spec.t_end)
        sigma = math.sqrt(dt)
        stride = max(1, int(sigma / (4.0 * dt)))
        snaps = [(0.0, f0)]

        def keep(n, t, field):
            if n % stride == 0:
                snaps.append((t, field))

        run(model, f0,
            SolverConfig(t_end=spec.t_end, cfl_fraction=spec.cfl_fraction),
            observers=(keep,))
        nu = time_continuity(snaps, sigma)
        assert 0.0 < nu / sigma <= 6.0
