import numpy as np
import pytest
from numpy.testing import assert_allclose

from srpmap import (CandidateGrid, InvalidGeometryError, InvalidGridError,
                    MicrophoneArray, build_ff_grid, build_grid, build_nf_grid,
                    enumerate_pairs, tdoa_table)


def square_array(side=1.0):
    return MicrophoneArray(np.array([
        [0.0, 0.0, 0.0], [side, 0.0, 0.0], [0.0, side, 0.0], [side, side, 0.0]]))


class TestMicrophoneArray:
    def test_rejects_single_mic(self):
        with pytest.raises(InvalidGeometryError):
            MicrophoneArray(np.array([[0.0, 0.0, 0.0]]))

    def test_rejects_duplicate_positions(self):
        with pytest.raises(InvalidGeometryError):
            MicrophoneArray(np.zeros((2, 3)))

    def test_rejects_bad_speed_of_sound(self):
        with pytest.raises(InvalidGeometryError):
            MicrophoneArray(np.array([[0.0, 0, 0], [1.0, 0, 0]]), speed_of_sound=0.0)

    def test_circular_layout(self):
        arr = MicrophoneArray.circular((1.0, 2.0, 3.0), 0.5, 8)
        assert arr.num_mics == 8
        radii = np.linalg.norm(arr.positions - np.array([1.0, 2.0, 3.0]), axis=1)
        assert_allclose(radii, 0.5)
        assert_allclose(arr.positions[:, 2], 3.0)


class TestEnumeratePairs:
    def test_pair_count_m4(self):
        assert enumerate_pairs(square_array()).num_pairs == 6

    def test_pair_count_m6(self):
        arr = MicrophoneArray.circular((0, 0, 0), 0.3, 6)
        assert enumerate_pairs(arr).num_pairs == 15

    def test_minimum_m2(self):
        arr = MicrophoneArray(np.array([[0.0, 0, 0], [1.0, 0, 0]]))
        table = enumerate_pairs(arr)
        assert table.num_pairs == 1
        assert table.pairs.tolist() == [[1, 0]]

    def test_ordering_is_by_second_then_first(self):
        table = enumerate_pairs(square_array())
        assert table.pairs.tolist() == [
            [1, 0], [2, 0], [3, 0], [2, 1], [3, 1], [3, 2]]

    def test_distances(self):
        table = enumerate_pairs(square_array(2.0))
        assert_allclose(sorted(table.distances),
                        [2.0, 2.0, 2.0, 2.0, np.sqrt(8.0), np.sqrt(8.0)])


class TestNfGrid:
    def test_table_scale_point_count(self):
        # 121 x 151 x 4 lattice
        grid = build_nf_grid((0, 0, 0), (4.0, 5.0, 0.1), 0.1 / 3.0)
        assert grid.num_points == 73084

    def test_corner_lattice(self):
        grid = build_nf_grid((0, 0, 0), (0.1, 0.1, 0.1), 0.1)
        assert grid.num_points == 8

    def test_row_major_x_fastest(self):
        grid = build_nf_grid((0, 0, 0), (0.2, 0.1, 0.0), 0.1)
        assert_allclose(grid.points[:3, 0], [0.0, 0.1, 0.2])
        assert_allclose(grid.points[:3, 1], 0.0)
        assert_allclose(grid.points[3:, 1], 0.1)

    def test_invalid_descriptors(self):
        with pytest.raises(InvalidGridError):
            build_nf_grid((0, 0, 0), (1.0, 1.0, 1.0), 0.0)
        with pytest.raises(InvalidGridError):
            build_nf_grid((0, 0, 0), (-1.0, 1.0, 1.0), 0.1)


class TestFfGrid:
    def test_half_sphere_point_count(self):
        grid = build_ff_grid(2.0)
        assert grid.num_points == 8101

    def test_pole_emitted_once(self):
        grid = build_ff_grid(10.0)
        at_pole = np.sum(np.all(grid.points == [0.0, 0.0, -1.0], axis=1))
        assert at_pole == 1
        assert grid.num_points == 9 * 36 + 1

    def test_unit_norm(self):
        grid = build_ff_grid(15.0)
        assert_allclose(np.linalg.norm(grid.points, axis=1), 1.0, atol=1e-12)

    def test_azimuth_fastest(self):
        grid = build_ff_grid(90.0)
        # polar 90 row first: azimuth 0, 90, 180, 270
        assert_allclose(grid.points[0], [1.0, 0.0, 0.0], atol=1e-15)
        assert_allclose(grid.points[1], [0.0, 1.0, 0.0], atol=1e-15)

    def test_resolution_must_divide(self):
        with pytest.raises(InvalidGridError):
            build_ff_grid(7.0)

    def test_non_unit_vectors_rejected(self):
        with pytest.raises(InvalidGridError):
            CandidateGrid(mode="ff", points=np.array([[1.0, 1.0, 0.0]]),
                          axes=(), axis_names=())

    def test_dispatcher(self):
        assert build_grid("ff", resolution_deg=30.0).mode == "ff"
        assert build_grid("nf", origin=(0, 0, 0), extents=(0.1, 0.1, 0.1),
                          resolution=0.1).mode == "nf"
        with pytest.raises(InvalidGridError):
            build_grid("nope", resolution_deg=1.0)


class TestTdoaTable:
    def test_equidistant_candidate_has_zero_tdoa(self):
        arr = MicrophoneArray(np.array([[0.0, 0, 0], [1.0, 0, 0]]))
        grid = CandidateGrid(mode="nf", points=np.array([[0.5, 10.0, 0.0]]),
                             axes=(), axis_names=())
        table = tdoa_table(arr, enumerate_pairs(arr), grid)
        assert_allclose(table.delta_t, 0.0, atol=1e-15)

    def test_ff_colinear_attains_limit(self):
        # pair (1, 0): baseline p_1 - p_0 = (0.6, 0, 0) along the direction
        arr = MicrophoneArray(np.array([[0.0, 0, 0], [0.6, 0, 0]]))
        grid = CandidateGrid(mode="ff", points=np.array([[1.0, 0.0, 0.0]]),
                             axes=(), axis_names=())
        table = tdoa_table(arr, enumerate_pairs(arr), grid)
        assert_allclose(table.delta_t[0, 0], 0.6 / 340.0)
        assert_allclose(table.delta_t[0, 0], table.limits[0])

    def test_largest_tdoa_interval(self):
        # d = 6.4 m gives a two-sided interval of 37.6..37.7 ms
        arr = MicrophoneArray(np.array([[0.0, 0, 0], [6.4, 0, 0]]))
        limit = enumerate_pairs(arr).distances[0] / arr.speed_of_sound
        assert 0.0376 <= 2 * limit <= 0.0377

    def test_bound_holds_everywhere(self, nf_mini, ff_mini):
        for scen in (nf_mini, ff_mini):
            bound = scen.tdoa.limits[None, :] + 1e-12
            assert np.all(np.abs(scen.tdoa.delta_t) <= bound)

    def test_ff_antisymmetry(self):
        rng = np.random.default_rng(1)
        arr = MicrophoneArray(rng.uniform(-0.3, 0.3, (4, 3)))
        pairs = enumerate_pairs(arr)
        dirs = rng.standard_normal((5, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        plus = tdoa_table(arr, pairs, CandidateGrid("ff", dirs, (), ()))
        minus = tdoa_table(arr, pairs, CandidateGrid("ff", -dirs, (), ()))
        assert_allclose(plus.delta_t, -minus.delta_t, atol=1e-18)

    def test_nf_converges_to_ff_at_long_range(self):
        rng = np.random.default_rng(2)
        arr = MicrophoneArray(rng.uniform(-0.25, 0.25, (5, 3)))
        pairs = enumerate_pairs(arr)
        toward = np.array([0.3, -0.5, 0.81])
        toward /= np.linalg.norm(toward)

        def relative_gap(range_multiple):
            far_point = arr.center + range_multiple * arr.aperture * toward
            nf = tdoa_table(arr, pairs,
                            CandidateGrid("nf", far_point[None, :], (), ()))
            # incident direction of a distant source along `toward` is -toward
            ff = tdoa_table(arr, pairs,
                            CandidateGrid("ff", -toward[None, :], (), ()))
            return np.linalg.norm(nf.delta_t - ff.delta_t) \
                / np.linalg.norm(ff.delta_t)

        # first-order gap: decays like 1/range, below 1e-3 by 300x aperture
        assert relative_gap(300.0) < 1e-3
        assert relative_gap(300.0) < relative_gap(100.0) / 2.0

    def test_candidate_on_microphone_allowed(self):
        arr = MicrophoneArray(np.array([[0.0, 0, 0], [1.0, 0, 0]]))
        grid = CandidateGrid(mode="nf", points=arr.positions[:1].copy(),
                             axes=(), axis_names=())
        table = tdoa_table(arr, enumerate_pairs(arr), grid)
        assert np.all(np.isfinite(table.delta_t))
