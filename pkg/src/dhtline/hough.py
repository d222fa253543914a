"""Hough feature aggregation, its adjoint, classical voting, and rasterization.

Feature maps are dense ``(C, H, W)`` float arrays; parametric maps are
``(C, n_theta, n_r)``. The forward operator sums, per channel and per grid
cell, the feature values along the rasterized center line of that cell; the
adjoint scatters parametric values back onto those same pixels. Both are
exact linear maps and share one precomputed line-membership table per grid,
so determinism is independent of the thread count: each output element is
reduced sequentially in a fixed order by exactly one worker.
"""

from __future__ import annotations

import functools
import os

# The pool size is fixed when numba first loads; allow >1 worker even on
# small hosts so determinism across thread counts stays testable.
os.environ.setdefault("NUMBA_NUM_THREADS", str(max(4, os.cpu_count() or 1)))
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

import numba
import numpy as np
from numba import njit, prange

from .geometry import (
    BinIndex,
    ImageDims,
    LineSegment,
    NoIntersectionError,
    ParametricLine,
    QuantizationGrid,
    bin_center,
    segment_from_params,
)

__all__ = [
    "rasterize_segment",
    "rasterize_line",
    "dht_forward",
    "rht_adjoint",
    "classical_accumulate",
    "resample_parametric_map",
    "concat_channels",
    "hough_plan",
    "max_threads",
]


def max_threads() -> int:
    """Largest worker count accepted by the aggregation kernels."""
    return numba.config.NUMBA_NUM_THREADS


def rasterize_segment(seg: LineSegment, dims: ImageDims) -> np.ndarray:
    """Integer (row, col) pixels covered by a segment, in traversal order.

    Steps one pixel at a time along the dominant axis from the
    lexicographically smaller endpoint, picking the nearest pixel on the
    other axis; consecutive pixels are 8-adjacent and every pixel center is
    within half a pixel of the continuous line.
    """
    seg = seg.ordered()
    x0, y0 = seg.p0
    x1, y1 = seg.p1
    dx, dy = x1 - x0, y1 - y0

    def _index(v: np.ndarray | float, n: int) -> np.ndarray:
        return np.clip(np.floor(v).astype(np.int64), 0, n - 1)

    if abs(dx) >= abs(dy):
        c0 = int(_index(x0, dims.width))
        c1 = int(_index(x1, dims.width))
        cols = np.arange(c0, c1 + 1, dtype=np.int64)
        ys = y0 + (cols + 0.5 - x0) * (dy / dx)
        rows = _index(ys, dims.height)
    else:
        r0 = int(_index(y0, dims.height))
        r1 = int(_index(y1, dims.height))
        step = 1 if r1 >= r0 else -1
        rows = np.arange(r0, r1 + step, step, dtype=np.int64)
        xs = x0 + (rows + 0.5 - y0) * (dx / dy)
        cols = _index(xs, dims.width)
    return np.stack([rows, cols], axis=1)


def rasterize_line(pl: ParametricLine, dims: ImageDims) -> np.ndarray:
    """Rasterize the image chord of an infinite (theta, r) line."""
    return rasterize_segment(segment_from_params(pl, dims), dims)


class HoughPlan:
    """Precomputed line membership for one grid, in CSR-like layout.

    ``line_pixels[line_starts[b]:line_starts[b+1]]`` holds the flat pixel
    indices of grid cell ``b = t * n_r + s`` in raster traversal order;
    the transposed table maps each pixel to the cells whose line crosses it,
    ordered by cell index.
    """

    def __init__(self, grid: QuantizationGrid):
        self.grid = grid
        dims = grid.dims
        n_bins = grid.n_theta * grid.n_r
        starts = np.zeros(n_bins + 1, dtype=np.int64)
        chunks: list[np.ndarray] = []
        b = 0
        for t in range(grid.n_theta):
            for s in range(grid.n_r):
                try:
                    px = rasterize_line(bin_center(BinIndex(t, s), grid), dims)
                except NoIntersectionError:
                    starts[b + 1] = starts[b]
                else:
                    flat = px[:, 0] * dims.width + px[:, 1]
                    chunks.append(flat)
                    starts[b + 1] = starts[b] + flat.shape[0]
                b += 1
        self.line_starts = starts
        self.line_pixels = (
            np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)
        )
        # Transpose: entries sorted by pixel, ties kept in cell order.
        entry_bins = np.repeat(np.arange(n_bins), np.diff(starts))
        order = np.argsort(self.line_pixels, kind="stable")
        self.pixel_bins = entry_bins[order]
        n_pixels = dims.width * dims.height
        occupancy = np.bincount(self.line_pixels, minlength=n_pixels)
        self.pixel_starts = np.zeros(n_pixels + 1, dtype=np.int64)
        np.cumsum(occupancy, out=self.pixel_starts[1:])


@functools.lru_cache(maxsize=8)
def hough_plan(grid: QuantizationGrid) -> HoughPlan:
    """Cached per-grid membership table shared by forward/adjoint/voting."""
    return HoughPlan(grid)


@njit(parallel=True, cache=True)
def _gather_sum(src2d, starts, indices, out2d):  # pragma: no cover - numba
    n_out = starts.shape[0] - 1
    n_chan = src2d.shape[0]
    for j in prange(n_out):
        lo, hi = starts[j], starts[j + 1]
        for c in range(n_chan):
            acc = 0.0
            for k in range(lo, hi):
                acc += src2d[c, indices[k]]
            out2d[c, j] = acc


def _run_gather(src2d, starts, indices, n_threads):
    out = np.empty((src2d.shape[0], starts.shape[0] - 1), dtype=np.float64)
    if n_threads is not None:
        if not (1 <= n_threads <= max_threads()):
            raise ValueError(
                f"thread count must be in [1, {max_threads()}], got {n_threads}"
            )
        prev = numba.get_num_threads()
        numba.set_num_threads(n_threads)
        try:
            _gather_sum(src2d, starts, indices, out)
        finally:
            numba.set_num_threads(prev)
    else:
        _gather_sum(src2d, starts, indices, out)
    return out


def _as_3d(x: np.ndarray, name: str) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise ValueError(f"{name} must be a (C, ...) rank-3 array, got shape {x.shape}")
    return x


def dht_forward(
    x: np.ndarray, grid: QuantizationGrid, n_threads: int | None = None
) -> np.ndarray:
    """Aggregate a (C, H, W) feature map into a (C, n_theta, n_r) map.

    Each output cell holds the sum of input features along the rasterized
    center line of that cell, summed in raster order.
    """
    x = _as_3d(x, "feature map")
    c, h, w = x.shape
    if (w, h) != (grid.dims.width, grid.dims.height):
        raise ValueError(
            f"feature map {w}x{h} does not match grid dims "
            f"{grid.dims.width}x{grid.dims.height}"
        )
    plan = hough_plan(grid)
    out = _run_gather(x.reshape(c, h * w), plan.line_starts, plan.line_pixels, n_threads)
    return out.reshape(c, grid.n_theta, grid.n_r)


def rht_adjoint(
    y: np.ndarray, grid: QuantizationGrid, n_threads: int | None = None
) -> np.ndarray:
    """Exact adjoint of dht_forward: (C, n_theta, n_r) back to (C, H, W).

    Satisfies <dht_forward(x), y> == <x, rht_adjoint(y)> for all x, y.
    """
    y = _as_3d(y, "parametric map")
    c, nt, nr = y.shape
    if (nt, nr) != (grid.n_theta, grid.n_r):
        raise ValueError(
            f"parametric map {nt}x{nr} does not match grid {grid.n_theta}x{grid.n_r}"
        )
    plan = hough_plan(grid)
    out = _run_gather(y.reshape(c, nt * nr), plan.pixel_starts, plan.pixel_bins, n_threads)
    return out.reshape(c, grid.dims.height, grid.dims.width)


def classical_accumulate(
    edges: np.ndarray,
    grid: QuantizationGrid,
    vote_threshold: float,
    n_threads: int | None = None,
) -> np.ndarray:
    """Binary Hough voting over a single-channel edge map.

    Pixels with edge value >= vote_threshold vote 1, all others 0; each grid
    cell holds its vote count. Equal to dht_forward of the binarized map.
    """
    edges = np.asarray(edges, dtype=np.float64)
    if edges.ndim == 2:
        edges = edges[None]
    if edges.ndim != 3 or edges.shape[0] != 1:
        raise ValueError(f"edge map must be single-channel, got shape {edges.shape}")
    votes = (edges >= vote_threshold).astype(np.float64)
    return dht_forward(votes, grid, n_threads=n_threads)


def resample_parametric_map(y: np.ndarray, new_theta: int, new_r: int) -> np.ndarray:
    """Bilinear resize over the (theta, r) axes, align-corners-false.

    Sample centers sit at (k + 0.5) / N in both source and target; samples
    falling outside the source grid clamp to the border row/column.
    """
    y = _as_3d(y, "parametric map")
    if new_theta < 1 or new_r < 1:
        raise ValueError(f"target sizes must be >= 1, got {new_theta}x{new_r}")
    c, nt, nr = y.shape

    def _axis_weights(n_src: int, n_dst: int):
        src = (np.arange(n_dst) + 0.5) * (n_src / n_dst) - 0.5
        i0 = np.floor(src).astype(np.int64)
        frac = src - i0
        i1 = np.clip(i0 + 1, 0, n_src - 1)
        i0 = np.clip(i0, 0, n_src - 1)
        return i0, i1, frac

    t0, t1, ft = _axis_weights(nt, new_theta)
    r0, r1, fr = _axis_weights(nr, new_r)
    ft = ft[:, None]
    fr = fr[None, :]
    top = y[:, t0][:, :, r0] * (1 - fr) + y[:, t0][:, :, r1] * fr
    bot = y[:, t1][:, :, r0] * (1 - fr) + y[:, t1][:, :, r1] * fr
    return top * (1 - ft) + bot * ft


def concat_channels(maps: list[np.ndarray]) -> np.ndarray:
    """Concatenate parametric maps along the channel axis, in input order."""
    if not maps:
        raise ValueError("need at least one map to concatenate")
    arrays = [_as_3d(m, "parametric map") for m in maps]
    base = arrays[0].shape[1:]
    for m in arrays[1:]:
        if m.shape[1:] != base:
            raise ValueError(f"mismatched map sizes: {m.shape[1:]} vs {base}")
    return np.concatenate(arrays, axis=0)
