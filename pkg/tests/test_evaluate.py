"""Tests for depth-map error metrics and the comparison grid."""

import math

import numpy as np
import pytest

from fracfocus.depth import recover_depth
from fracfocus.evaluate import (EmptyMaskError, ComparisonTable, ErrorReport,
                                axis_profile, comparison_table,
                                rms_error_percent)
from fracfocus.focus import local_focus_volume, nonlocalize_volume
from fracfocus.grids import DepthMap
from fracfocus.kernel2d import build_kernel
from fracfocus.synth import SceneSpec, ground_truth


def _map(values, valid=None, **meta):
    values = np.asarray(values, dtype=float)
    if valid is None:
        valid = np.ones(values.shape, dtype=bool)
    return DepthMap(values=values, valid=valid, **meta)


def _report(rms_percent):
    """Bare ErrorReport carrying only an error figure, for table tests."""
    return ErrorReport(rms_percent=rms_percent,
                       rms_absolute=rms_percent / 100.0,
                       n_valid=1, n_total=1)


class TestRmsErrorPercent:

    def test_identical_maps_have_zero_error(self):
        rng = np.random.default_rng(3)
        m = _map(rng.uniform(0.0, 1.0, size=(6, 6)))
        report = rms_error_percent(m, m, z_range=1.0)
        assert report.rms_percent == 0.0
        assert report.rms_absolute == 0.0
        assert report.n_valid == 36
        assert report.coverage == 1.0

    def test_uniform_offset_is_percent_of_range(self):
        """A constant 0.01 error over a unit range reads as 1.0 percent."""
        truth = _map(np.full((4, 4), 0.5))
        recovered = _map(np.full((4, 4), 0.51))
        report = rms_error_percent(recovered, truth, z_range=1.0)
        assert report.rms_percent == pytest.approx(1.0, rel=1e-12)
        assert report.rms_absolute == pytest.approx(0.01, rel=1e-12)

    def test_matches_hand_loop_over_joint_mask(self):
        rng = np.random.default_rng(17)
        a = rng.normal(size=(8, 8))
        b = rng.normal(size=(8, 8))
        va = rng.random((8, 8)) < 0.7
        vb = rng.random((8, 8)) < 0.7
        va[0, 0] = vb[0, 0] = True  # guarantee an overlap
        total, count = 0.0, 0
        for i in range(8):
            for j in range(8):
                if va[i, j] and vb[i, j]:
                    d = a[i, j] - b[i, j]
                    total += d * d
                    count += 1
        expected = 100.0 * math.sqrt(total / count) / 2.5
        report = rms_error_percent(_map(a, va), _map(b, vb), z_range=2.5)
        assert report.rms_percent == pytest.approx(expected, rel=1e-12)
        assert report.n_valid == count
        assert report.n_total == 64

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="shape"):
            rms_error_percent(_map(np.zeros((4, 4))),
                              _map(np.zeros((4, 5))), z_range=1.0)

    def test_disjoint_masks_raise(self):
        left = np.zeros((3, 3), dtype=bool)
        left[:, 0] = True
        right = np.zeros((3, 3), dtype=bool)
        right[:, 2] = True
        with pytest.raises(EmptyMaskError):
            rms_error_percent(_map(np.zeros((3, 3)), left),
                              _map(np.zeros((3, 3)), right), z_range=1.0)
        assert issubclass(EmptyMaskError, ValueError)

    def test_range_defaults_to_recovered_metadata(self):
        truth = _map(np.full((4, 4), 0.2))
        recovered = _map(np.full((4, 4), 0.3), z_min=0.0, z_max=2.0)
        implicit = rms_error_percent(recovered, truth)
        explicit = rms_error_percent(recovered, truth, z_range=2.0)
        assert implicit.rms_percent == explicit.rms_percent

    def test_missing_metadata_requires_explicit_range(self):
        bare = _map(np.zeros((3, 3)))
        with pytest.raises(ValueError, match="z_range"):
            rms_error_percent(bare, bare)

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_non_positive_range_rejected(self, bad):
        m = _map(np.zeros((3, 3)))
        with pytest.raises(ValueError, match="positive"):
            rms_error_percent(m, m, z_range=bad)

    def test_symmetric_in_argument_order(self):
        rng = np.random.default_rng(9)
        a = _map(rng.normal(size=(5, 5)))
        b = _map(rng.normal(size=(5, 5)))
        fwd = rms_error_percent(a, b, z_range=1.0)
        rev = rms_error_percent(b, a, z_range=1.0)
        assert fwd.rms_percent == rev.rms_percent

    def test_error_scales_linearly(self):
        rng = np.random.default_rng(21)
        base = rng.uniform(size=(6, 6))
        err = rng.normal(size=(6, 6))
        truth = _map(base)
        one = rms_error_percent(_map(base + err), truth, z_range=1.0)
        two = rms_error_percent(_map(base + 2.0 * err), truth, z_range=1.0)
        assert two.rms_percent == pytest.approx(2.0 * one.rms_percent,
                                                rel=1e-12)

    def test_values_at_invalid_pixels_are_ignored(self):
        valid = np.ones((5, 5), dtype=bool)
        valid[2, 2] = False
        values = np.linspace(0.0, 1.0, 25).reshape(5, 5)
        truth = _map(np.full((5, 5), 0.5))
        tame = values.copy()
        wild = values.copy()
        wild[2, 2] = 1e9
        a = rms_error_percent(_map(tame, valid), truth, z_range=1.0)
        b = rms_error_percent(_map(wild, valid), truth, z_range=1.0)
        assert a.rms_percent == b.rms_percent
        assert a.n_valid == 24

    def test_metadata_passthrough(self):
        recovered = _map(np.zeros((3, 3)), q=2, alpha=1.5, zeta=4,
                         z_min=0.0, z_max=1.0)
        report = rms_error_percent(recovered, _map(np.zeros((3, 3))))
        assert report.method == "nonlocal"
        assert (report.q, report.alpha, report.zeta) == (2, 1.5, 4)

    def test_coverage_fraction(self):
        valid = np.zeros((3, 4), dtype=bool)
        valid.flat[:5] = True
        m = _map(np.zeros((3, 4)), valid)
        report = rms_error_percent(m, _map(np.zeros((3, 4))), z_range=1.0)
        assert report.coverage == pytest.approx(5.0 / 12.0)


@pytest.fixture(scope="module")
def table(small_plane):
    return comparison_table(small_plane.stack, small_plane.truth, q=2,
                            alphas=(0.0, 1.5), zetas=(1, 3))


class TestComparisonTable:
    """Grid sweep over (zeta, alpha) against the plain local pipeline."""

    def test_grid_holds_all_requested_cells(self, table):
        assert set(table.grid) == {(1, 0.0), (1, 1.5), (3, 0.0), (3, 1.5)}
        assert table.q == 2
        assert table.alphas == (0.0, 1.5)
        assert table.zetas == (1, 3)

    def test_alpha_zero_column_equals_local_at_base_stride(self, table,
                                                           small_plane):
        """The alpha = 0 kernel is a delta, so every alpha = 0 cell must
        reproduce the plain local result at the table's stride exactly."""
        stack, truth = small_plane.stack, small_plane.truth
        direct = rms_error_percent(recover_depth(local_focus_volume(stack, 2)),
                                   truth, z_range=stack.z_max - stack.z_min)
        for zeta in table.zetas:
            assert table.rms(zeta, 0.0) == direct.rms_percent

    def test_single_cell_matches_direct_pipeline(self, small_plane):
        stack, truth = small_plane.stack, small_plane.truth
        z_range = stack.z_max - stack.z_min
        table = comparison_table(stack, truth, q=2, alphas=(1.5,), zetas=(3,),
                                 local_strides=(2,))
        base = local_focus_volume(stack, 2)
        cell = rms_error_percent(
            recover_depth(nonlocalize_volume(base, build_kernel(1.5, 3))),
            truth, z_range)
        assert table.rms(3, 1.5) == cell.rms_percent
        loc = rms_error_percent(recover_depth(base), truth, z_range)
        assert table.local[2].rms_percent == loc.rms_percent

    def test_local_column_defaults_to_zetas(self, table, small_plane):
        assert set(table.local) == {1, 3}
        stack, truth = small_plane.stack, small_plane.truth
        direct = rms_error_percent(recover_depth(local_focus_volume(stack, 1)),
                                   truth, z_range=stack.z_max - stack.z_min)
        assert table.local[1].rms_percent == direct.rms_percent

    def test_best_cell_is_grid_minimum(self, table):
        best = table.best_cell
        assert best in table.grid
        low = min(rep.rms_percent for rep in table.grid.values())
        assert table.grid[best].rms_percent == low

    def test_cells_carry_method_metadata(self, table):
        cell = table.grid[(3, 1.5)]
        assert cell.method == "nonlocal"
        assert (cell.q, cell.alpha, cell.zeta) == (2, 1.5, 3)
        assert table.local[1].method == "local"
        assert table.local[1].q == 1

    def test_format_layout(self, table):
        lines = table.format().splitlines()
        assert len(lines) == 2 + len(table.zetas)
        assert "q=2" in lines[0]
        assert "zeta" in lines[1]
        for zeta, line in zip(table.zetas, lines[2:]):
            assert line.split()[0] == str(zeta)

    def test_empty_parameter_lists_rejected(self, small_plane):
        stack, truth = small_plane.stack, small_plane.truth
        with pytest.raises(ValueError):
            comparison_table(stack, truth, q=1, alphas=())
        with pytest.raises(ValueError):
            comparison_table(stack, truth, q=1, zetas=())

    def test_spread_ignores_alpha_zero_cells(self):
        table = ComparisonTable(q=1, alphas=(0.0, 0.5, 1.0), zetas=(1,),
                                grid={(1, 0.0): _report(50.0),
                                      (1, 0.5): _report(2.0),
                                      (1, 1.0): _report(3.0)})
        assert table.spread() == pytest.approx(1.5)

    def test_spread_with_perfect_best_cell(self):
        table = ComparisonTable(q=1, alphas=(0.5, 1.0), zetas=(1,),
                                grid={(1, 0.5): _report(0.0),
                                      (1, 1.0): _report(1.0)})
        assert table.spread() == float("inf")

    def test_spread_requires_positive_alpha(self):
        table = ComparisonTable(q=1, alphas=(0.0,), zetas=(1,),
                                grid={(1, 0.0): _report(1.0)})
        with pytest.raises(ValueError):
            table.spread()

    def test_best_cell_requires_cells(self):
        with pytest.raises(ValueError):
            ComparisonTable(q=1, alphas=(), zetas=()).best_cell


class TestAxisProfile:

    def _sphere_truth(self):
        scene = SceneSpec(kind="sphere", radius=1.0)
        return ground_truth(scene, width=21, height=21, h=0.12)

    def test_perfect_recovery_pairs_equal(self):
        truth = self._sphere_truth()
        profile = axis_profile(truth, truth, axis="y")
        assert profile
        for _, recovered_z, true_z in profile:
            assert recovered_z == true_z

    def test_sphere_center_column_is_circle_arc(self):
        """Down the middle of the sphere the depth is sqrt(1 - y^2)."""
        truth = self._sphere_truth()
        profile = axis_profile(truth, truth, axis="y")
        coords = [c for c, _, _ in profile]
        assert coords == pytest.approx([(i - 10) * 0.12 for i in range(2, 19)])
        for y, _, true_z in profile:
            assert true_z == pytest.approx(math.sqrt(1.0 - y * y), abs=1e-12)

    def test_skips_jointly_invalid_pixels(self):
        values = np.zeros((9, 9))
        holes = np.ones((9, 9), dtype=bool)
        holes[2:5, 4] = False
        profile = axis_profile(_map(values, holes), _map(values), axis="y")
        assert len(profile) == 6
        coords = {c for c, _, _ in profile}
        assert all((i - 4.0) not in coords for i in (2, 3, 4))

    def test_x_axis_walks_middle_row(self):
        values = np.arange(35, dtype=float).reshape(5, 7)
        profile = axis_profile(_map(values), _map(values), axis="x")
        assert [r for _, r, _ in profile] == list(values[2, :])
        assert [c for c, _, _ in profile] == [float(j - 3) for j in range(7)]

    def test_spacing_scales_coordinates(self):
        values = np.zeros((3, 5))
        profile = axis_profile(_map(values, h=0.5), _map(values), axis="x")
        assert [c for c, _, _ in profile] == [-1.0, -0.5, 0.0, 0.5, 1.0]

    def test_axis_validation(self):
        m = _map(np.zeros((3, 3)))
        with pytest.raises(ValueError, match="axis"):
            axis_profile(m, m, axis="z")

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="shape"):
            axis_profile(_map(np.zeros((3, 3))), _map(np.zeros((4, 3))))
