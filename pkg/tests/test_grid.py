"""Tests for grids, fields, boundary padding, sampling, and CSV export."""

import numpy as np
import pytest

from panov_fv import (
    Dirichlet,
    Field,
    Grid,
    NonFiniteSample,
    Outflow,
    Periodic,
    as_point_function,
    export_csv,
    make_ex51,
    make_ex52,
    pad,
    pad_array,
    sample_initial,
    sample_r,
)

from _helpers import field_of, line_grid, square_grid


class TestGrid:
    def test_cell_geometry_1d(self):
        grid = Grid(origin=(0.0,), extent=(6.0,), cells=(6,))
        assert grid.dim == 1
        assert grid.dx(0) == 1.0
        assert grid.cell_volume == 1.0
        assert np.array_equal(grid.centers(0),
                              [0.5, 1.5, 2.5, 3.5, 4.5, 5.5])

    def test_cell_geometry_2d(self):
        grid = Grid(origin=(0.0, -1.0), extent=(2.0, 4.0), cells=(4, 8))
        assert grid.dim == 2
        assert grid.dx(0) == 0.5
        assert grid.dx(1) == 0.5
        assert grid.cell_volume == 0.25
        assert grid.values_shape == (8, 4)
        X, Y = grid.meshes()
        assert X.shape == (8, 4)
        assert X[0, 0] == 0.25 and Y[0, 0] == -0.75

    def test_centers_match_affine_formula_exactly(self):
        grid = Grid(origin=(0.3,), extent=(7.7,), cells=(101,))
        i = np.arange(101)
        want = 0.3 + (i + 0.5) * grid.dx(0)
        assert np.array_equal(grid.centers(0), want)

    @pytest.mark.parametrize("cells", [(0,), (4, 0)])
    def test_rejects_empty_axes(self, cells):
        with pytest.raises(ValueError):
            Grid(origin=(0.0,) * len(cells), extent=(1.0,) * len(cells),
                 cells=cells)

    def test_rejects_nonpositive_extent(self):
        with pytest.raises(ValueError):
            Grid(origin=(0.0,), extent=(0.0,), cells=(4,))

    def test_field_shape_checked(self):
        grid = line_grid(4)
        with pytest.raises(ValueError):
            Field(grid=grid, values=np.zeros(5))

    def test_field_values_must_be_finite(self):
        grid = line_grid(3)
        with pytest.raises(NonFiniteSample):
            Field(grid=grid, values=np.array([0.0, np.nan, 1.0]))


class TestPadding:
    def test_outflow_edge_copy(self):
        got = pad_array(np.array([1.0, 2.0, 3.0]), Outflow(), 1)
        assert np.array_equal(got, [1.0, 1.0, 2.0, 3.0, 3.0])

    def test_periodic_wrap(self):
        got = pad_array(np.array([1.0, 2.0, 3.0]), Periodic(), 1)
        assert np.array_equal(got, [3.0, 1.0, 2.0, 3.0, 1.0])

    def test_dirichlet_constants(self):
        got = pad_array(np.array([1.0, 2.0]), Dirichlet(left=0.0, right=9.0), 1)
        assert np.array_equal(got, [0.0, 1.0, 2.0, 9.0])

    def test_width_two(self):
        got = pad_array(np.array([1.0, 2.0]), Outflow(), 2)
        assert np.array_equal(got, [1.0, 1.0, 1.0, 2.0, 2.0, 2.0])

    def test_dirichlet_sides_per_axis(self):
        bc = Dirichlet(left=1.0, right=2.0, bottom=3.0, top=4.0)
        assert bc.sides(0) == (1.0, 2.0)
        assert bc.sides(1) == (3.0, 4.0)

    def test_dirichlet_requires_finite_values(self):
        with pytest.raises(ValueError):
            Dirichlet(left=np.inf, right=0.0)

    def test_dirichlet_vertical_padding_uses_bottom_top(self):
        vals = np.arange(6.0).reshape(2, 3)
        bc = Dirichlet(left=-1.0, right=-2.0, bottom=-3.0, top=-4.0)
        got = pad_array(vals, bc, 1, axis=0, spatial_axis=1)
        assert np.array_equal(got[0], [-3.0, -3.0, -3.0])
        assert np.array_equal(got[-1], [-4.0, -4.0, -4.0])

    def test_field_pad_all_axes(self):
        grid = square_grid(2)
        field = field_of(grid, [[1.0, 2.0], [3.0, 4.0]])
        got = pad(field, Periodic(), 1)
        assert got.shape == (4, 4)
        assert got[0, 0] == 4.0 and got[1, 1] == 1.0
        assert got[-1, -1] == 1.0


class TestSampling:
    def test_constant_data(self):
        grid = square_grid(5, extent=6.0)
        field = sample_initial(grid, lambda x, y: np.full(np.shape(x), 2.0))
        assert (field.values == 2.0).all()
        assert field.time == 0.0

    def test_center_sampling_linear(self):
        grid = line_grid(2, extent=1.0)
        field = sample_initial(grid, lambda x: np.asarray(x))
        assert np.array_equal(field.values, [0.25, 0.75])

    def test_staircase_initial_data_left_plateau(self):
        # Cell 0 of a 6-cell grid on [0, 6] has center 0.5, left of the
        # second breakpoint, where the initial staircase sits at -p*q = -3.2.
        _, u0, _, spec = make_ex51()
        field = sample_initial(spec.grid(6, 1), u0)
        assert field.values[0] == -3.2

    def test_staircase_r_plateaus(self):
        model, _, _, spec = make_ex52()
        r = model.beta.r
        field = sample_r(spec.grid(6, 1), r)
        assert field.values[0] == 2.0
        assert field.values[5] == 1.0

    def test_zero_r(self):
        grid = line_grid(4)
        field = sample_r(grid, lambda x: np.zeros(np.shape(x)))
        assert (field.values == 0.0).all()

    def test_non_finite_sample_rejected(self):
        grid = line_grid(2)
        with pytest.raises(NonFiniteSample):
            sample_initial(grid, lambda x: np.where(np.asarray(x) > 0.5,
                                                    np.inf, 0.0))

    def test_sampling_idempotence_1d(self):
        grid = line_grid(7, extent=3.0)
        rng = np.random.default_rng(3)
        field = field_of(grid, rng.standard_normal(7))
        resampled = sample_initial(grid, as_point_function(field))
        assert np.array_equal(resampled.values, field.values)

    def test_sampling_idempotence_2d(self):
        grid = square_grid(5, extent=2.0)
        rng = np.random.default_rng(4)
        field = field_of(grid, rng.standard_normal((5, 5)))
        resampled = sample_initial(grid, as_point_function(field))
        assert np.array_equal(resampled.values, field.values)

    def test_point_function_uses_half_open_cells(self):
        grid = line_grid(2, extent=2.0)
        lookup = as_point_function(field_of(grid, [10.0, 20.0]))
        assert lookup(np.array([0.0]))[0] == 10.0
        assert lookup(np.array([1.0]))[0] == 20.0
        assert lookup(np.array([1.999]))[0] == 20.0

    def test_with_values_advances_time(self):
        grid = line_grid(3)
        field = field_of(grid, [1.0, 2.0, 3.0])
        other = field.with_values(np.zeros(3), time=2.5)
        assert other.time == 2.5
        assert field.time == 0.0


class TestCsvExport:
    def test_1d_header_and_roundtrip(self, tmp_path):
        grid = line_grid(3, extent=3.0)
        field = field_of(grid, [1.0, 1.0 / 3.0, 2.0])
        path = tmp_path / "sol.csv"
        export_csv(field, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,u"
        assert len(lines) == 4
        back = np.loadtxt(path, delimiter=",", skiprows=1)
        assert np.array_equal(back[:, 0], grid.centers(0))
        assert np.array_equal(back[:, 1], field.values)

    def test_1d_with_beta_column(self, tmp_path):
        grid = line_grid(2)
        field = field_of(grid, [1.0, 2.0])
        path = tmp_path / "sol.csv"
        export_csv(field, path, beta=np.array([3.0, 4.0]))
        lines = path.read_text().splitlines()
        assert lines[0] == "x,u,beta"
        back = np.loadtxt(path, delimiter=",", skiprows=1)
        assert np.array_equal(back[:, 2], [3.0, 4.0])

    def test_2d_header_and_row_order(self, tmp_path):
        grid = square_grid(2, extent=2.0)
        field = field_of(grid, [[1.0, 2.0], [3.0, 4.0]])
        path = tmp_path / "sol.csv"
        export_csv(field, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,y,u"
        assert len(lines) == 5
        back = np.loadtxt(path, delimiter=",", skiprows=1)
        # x varies fastest
        assert np.array_equal(back[:, 0], [0.5, 1.5, 0.5, 1.5])
        assert np.array_equal(back[:, 1], [0.5, 0.5, 1.5, 1.5])
        assert np.array_equal(back[:, 2], [1.0, 2.0, 3.0, 4.0])
