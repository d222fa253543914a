import math

import numpy as np
import pytest

from dhtline.geometry import (
    BinIndex,
    ImageDims,
    ParametricLine,
    bin_center,
    grid_from_intervals,
    quantize,
)
from dhtline.hough import (
    classical_accumulate,
    concat_channels,
    dht_forward,
    rasterize_line,
    rasterize_segment,
    resample_parametric_map,
    rht_adjoint,
)

from conftest import naive_dht


def small_grid(w=16, h=16, n_theta=18, n_r=20):
    dims = ImageDims(w, h)
    return grid_from_intervals(dims, math.pi / n_theta, dims.diagonal / n_r)


class TestRasterize:
    def test_centered_horizontal_5x5(self):
        px = rasterize_line(ParametricLine(0.0, 0.0), ImageDims(5, 5))
        assert px.tolist() == [[2, 0], [2, 1], [2, 2], [2, 3], [2, 4]]

    def test_column_zero_chord(self):
        px = rasterize_line(ParametricLine(math.pi / 2, 2.5), ImageDims(5, 5))
        assert sorted(px.tolist()) == [[0, 0], [1, 0], [2, 0], [3, 0], [4, 0]]

    def test_main_diagonal_5x5(self):
        px = rasterize_line(ParametricLine(math.pi / 4, 0.0), ImageDims(5, 5))
        assert px.tolist() == [[0, 0], [1, 1], [2, 2], [3, 3], [4, 4]]

    def test_pixels_in_bounds_adjacent_unique(self):
        dims = ImageDims(32, 24)
        rng = np.random.default_rng(5)
        for _ in range(200):
            pl = ParametricLine(
                rng.uniform(0, math.pi - 1e-9), rng.uniform(-11, 11)
            )
            px = rasterize_line(pl, dims)
            assert np.all((px[:, 0] >= 0) & (px[:, 0] < 24))
            assert np.all((px[:, 1] >= 0) & (px[:, 1] < 32))
            assert len({tuple(p) for p in px.tolist()}) == len(px)
            if len(px) > 1:
                steps = np.abs(np.diff(px, axis=0))
                assert steps.max() <= 1

    def test_pixel_centers_near_line(self):
        dims = ImageDims(20, 20)
        rng = np.random.default_rng(6)
        for _ in range(100):
            pl = ParametricLine(rng.uniform(0, math.pi - 1e-9), rng.uniform(-8, 8))
            px = rasterize_line(pl, dims)
            # signed distance of pixel centers (col+0.5, row+0.5) to the line
            cx = px[:, 1] + 0.5 - dims.width / 2.0
            cy = px[:, 0] + 0.5 - dims.height / 2.0
            dist = np.abs(-cx * math.sin(pl.theta) + cy * math.cos(pl.theta) - pl.r)
            assert dist.max() <= 1 / math.sqrt(2) + 1e-9


class TestDhtForward:
    def test_zero_in_zero_out(self):
        grid = small_grid()
        out = dht_forward(np.zeros((2, 16, 16)), grid)
        assert out.shape == (2, grid.n_theta, grid.n_r)
        assert not out.any()

    def test_single_row_votes(self):
        dims = ImageDims(5, 5)
        grid = grid_from_intervals(dims, math.pi / 4, dims.diagonal / 8)
        x = np.zeros((1, 5, 5))
        x[0, 2, :] = 1.0
        out = dht_forward(x, grid)
        b = quantize(ParametricLine(0.0, 0.0), grid)
        center = bin_center(b, grid)
        # the bin holding (theta=0, r=0) collects the whole row iff its
        # center line rasterizes onto row 2
        if abs(center.r) < 0.5 and center.theta < math.pi / 8:
            assert out[0, b.t, b.s] == 5.0

    def test_linearity_power_of_two(self):
        grid = small_grid()
        rng = np.random.default_rng(0)
        x = rng.random((3, 16, 16))
        assert np.array_equal(dht_forward(2.0 * x, grid), 2.0 * dht_forward(x, grid))

    def test_linearity_random_combination(self):
        grid = small_grid()
        rng = np.random.default_rng(1)
        x1 = rng.random((2, 16, 16))
        x2 = rng.random((2, 16, 16))
        lhs = dht_forward(1.7 * x1 + x2, grid)
        rhs = 1.7 * dht_forward(x1, grid) + dht_forward(x2, grid)
        assert np.allclose(lhs, rhs, rtol=1e-6)

    def test_matches_naive_oracle_exactly(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            w, h = rng.integers(4, 17, size=2)
            nt, nr = rng.integers(4, 21, size=2)
            grid = small_grid(int(w), int(h), int(nt), int(nr))
            x = rng.integers(0, 10, size=(2, int(h), int(w))).astype(np.float64)
            assert np.array_equal(dht_forward(x, grid), naive_dht(x, grid))

    def test_dim_mismatch(self):
        grid = small_grid()
        with pytest.raises(ValueError):
            dht_forward(np.zeros((1, 8, 8)), grid)

    def test_deterministic_across_threads(self):
        grid = small_grid()
        rng = np.random.default_rng(3)
        x = rng.random((4, 16, 16))
        outs = [dht_forward(x, grid, n_threads=n) for n in (1, 2, 4)]
        assert np.array_equal(outs[0], outs[1])
        assert np.array_equal(outs[0], outs[2])


class TestRhtAdjoint:
    def test_zero_in_zero_out(self):
        grid = small_grid()
        out = rht_adjoint(np.zeros((2, grid.n_theta, grid.n_r)), grid)
        assert out.shape == (2, 16, 16)
        assert not out.any()

    def test_one_hot_paints_the_line(self):
        grid = small_grid()
        b = BinIndex(5, 9)
        y = np.zeros((1, grid.n_theta, grid.n_r))
        y[0, b.t, b.s] = 1.0
        out = rht_adjoint(y, grid)
        px = rasterize_line(bin_center(b, grid), grid.dims)
        expected = np.zeros((16, 16))
        expected[px[:, 0], px[:, 1]] = 1.0
        assert np.array_equal(out[0], expected)

    def test_adjoint_identity_100_pairs(self):
        grid = small_grid()
        rng = np.random.default_rng(4)
        for _ in range(100):
            x = rng.standard_normal((3, 16, 16))
            y = rng.standard_normal((3, grid.n_theta, grid.n_r))
            lhs = float((dht_forward(x, grid) * y).sum())
            rhs = float((x * rht_adjoint(y, grid)).sum())
            bound = 1e-6 * np.linalg.norm(x) * np.linalg.norm(y)
            assert abs(lhs - rhs) <= bound

    def test_dim_mismatch(self):
        grid = small_grid()
        with pytest.raises(ValueError):
            rht_adjoint(np.zeros((1, 3, 3)), grid)


class TestClassicalAccumulate:
    def test_blank_map(self):
        grid = small_grid()
        assert not classical_accumulate(np.zeros((1, 16, 16)), grid, 0.5).any()

    def test_equals_binarized_forward(self):
        grid = small_grid()
        rng = np.random.default_rng(7)
        edges = rng.random((1, 16, 16))
        votes = classical_accumulate(edges, grid, 0.4)
        binarized = (edges >= 0.4).astype(np.float64)
        assert np.array_equal(votes, dht_forward(binarized, grid))

    def test_full_width_line_vote_count(self):
        dims = ImageDims(100, 100)
        grid = grid_from_intervals(dims, math.pi / 100, math.sqrt(2.0))
        # draw the exact pixels of a near-horizontal bin-center line: that
        # bin must collect one vote per drawn pixel
        b = quantize(ParametricLine(0.0, -19.5), grid)
        px = rasterize_line(bin_center(b, grid), dims)
        edges = np.zeros((1, 100, 100))
        edges[0, px[:, 0], px[:, 1]] = 1.0
        votes = classical_accumulate(edges, grid, 0.5)
        assert votes[0, b.t, b.s] == len(px) == 100
        assert votes.max() == 100.0

    def test_threshold_above_one(self):
        grid = small_grid()
        assert not classical_accumulate(np.ones((1, 16, 16)), grid, 1.1).any()

    def test_multichannel_rejected(self):
        grid = small_grid()
        with pytest.raises(ValueError):
            classical_accumulate(np.zeros((2, 16, 16)), grid, 0.5)


class TestResample:
    def test_identity(self):
        rng = np.random.default_rng(8)
        y = rng.random((2, 7, 9))
        assert np.allclose(resample_parametric_map(y, 7, 9), y)

    def test_constant_preserved(self):
        y = np.full((1, 4, 6), 3.25)
        out = resample_parametric_map(y, 9, 5)
        assert np.allclose(out, 3.25)

    def test_corner_samples_2x2_to_4x4(self):
        y = np.array([[[1.0, 3.0], [5.0, 7.0]]])
        out = resample_parametric_map(y, 4, 4)
        assert out[0, 0, 0] == pytest.approx(1.0)
        assert out[0, 0, 3] == pytest.approx(3.0)
        assert out[0, 3, 0] == pytest.approx(5.0)
        assert out[0, 3, 3] == pytest.approx(7.0)
        # interior sample (src frac 0.25, 0.25) by hand bilinear arithmetic
        assert out[0, 1, 1] == pytest.approx(2.5)

    def test_bad_sizes(self):
        with pytest.raises(ValueError):
            resample_parametric_map(np.zeros((1, 2, 2)), 0, 4)


class TestConcat:
    def test_single_input(self):
        y = np.random.default_rng(9).random((2, 3, 4))
        assert np.array_equal(concat_channels([y]), y)

    def test_two_maps_order(self):
        a = np.zeros((1, 3, 4))
        b = np.ones((2, 3, 4))
        out = concat_channels([a, b])
        assert out.shape == (3, 3, 4)
        assert not out[0].any()
        assert out[1:].all()

    def test_k_copies(self):
        m = np.random.default_rng(10).random((2, 4, 4))
        out = concat_channels([m, m, m])
        for k in range(3):
            assert np.array_equal(out[2 * k : 2 * k + 2], m)

    def test_mismatch_rejected(self):
        with pytest.raises(ValueError):
            concat_channels([np.zeros((1, 3, 4)), np.zeros((1, 4, 3))])
