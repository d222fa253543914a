"""Shared helpers: independent brute-force oracles and random line sampling.

The oracles here deliberately avoid the package's rasterization/aggregation
machinery: pure-Python clipping, stepping, and float accumulation, so they
can serve as independent references for the vectorized implementations.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from dhtline.geometry import (
    ImageDims,
    ParametricLine,
    QuantizationGrid,
    fold_parametric,
    segment_from_params,
)


def naive_clip_line(theta: float, r: float, w: int, h: int):
    """Clip the infinite line (theta, r) to [0,w]x[0,h] with plain Python.

    Returns two (x, y) endpoints or None when the chord is empty/degenerate.
    Mirrors the centered-coordinate sign convention r = -x sin + y cos.
    """
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    bx, by = -r * sin_t + w / 2.0, r * cos_t + h / 2.0
    dx, dy = cos_t, sin_t
    lo, hi = -1e18, 1e18
    for base, d, a, b in ((bx, dx, 0.0, float(w)), (by, dy, 0.0, float(h))):
        if abs(d) < 1e-9:
            if base < a - 1e-9 or base > b + 1e-9:
                return None
            continue
        t0, t1 = (a - base) / d, (b - base) / d
        if t0 > t1:
            t0, t1 = t1, t0
        lo, hi = max(lo, t0), min(hi, t1)
    if hi - lo < 1e-9:
        return None
    p0 = (bx + lo * dx, by + lo * dy)
    p1 = (bx + hi * dx, by + hi * dy)
    if p1 < p0:
        p0, p1 = p1, p0
    return p0, p1


def naive_rasterize(p0, p1, w: int, h: int):
    """Dominant-axis stepping with nearest-pixel selection, pure Python."""
    (x0, y0), (x1, y1) = p0, p1
    dx, dy = x1 - x0, y1 - y0
    pixels = []

    def clampi(v, n):
        return min(max(v, 0), n - 1)

    if abs(dx) >= abs(dy):
        c0 = clampi(math.floor(x0), w)
        c1 = clampi(math.floor(x1), w)
        slope = dy / dx
        for c in range(c0, c1 + 1):
            y = y0 + (c + 0.5 - x0) * slope
            pixels.append((clampi(math.floor(y), h), c))
    else:
        r0 = clampi(math.floor(y0), h)
        r1 = clampi(math.floor(y1), h)
        step = 1 if r1 >= r0 else -1
        slope = dx / dy
        for rr in range(r0, r1 + step, step):
            x = x0 + (rr + 0.5 - y0) * slope
            pixels.append((rr, clampi(math.floor(x), w)))
    return pixels


def naive_dht(x: np.ndarray, grid: QuantizationGrid) -> np.ndarray:
    """Per-bin brute-force line sums with plain float accumulation.

    Summation and rasterization are scalar Python, independent of the
    vectorized aggregation path; only the chord endpoints come from the
    shared clipping primitive (they define pixel membership and must agree
    bit-for-bit, or dominant-axis ties would flip arbitrarily).
    """
    from dhtline.geometry import BinIndex, NoIntersectionError, bin_center

    c, h, w = x.shape
    out = np.zeros((c, grid.n_theta, grid.n_r))
    for t in range(grid.n_theta):
        for s in range(grid.n_r):
            try:
                seg = segment_from_params(bin_center(BinIndex(t, s), grid), grid.dims)
            except NoIntersectionError:
                continue
            for ch in range(c):
                acc = 0.0
                for row, col in naive_rasterize(seg.p0, seg.p1, w, h):
                    acc += float(x[ch, row, col])
                out[ch, t, s] = acc
    return out


def random_parametric_line(
    rng: np.random.Generator, dims: ImageDims, r_limit: float | None = None
) -> ParametricLine:
    """Uniform (theta, r) with |r| bounded so the line crosses the image."""
    if r_limit is None:
        r_limit = 0.85 * min(dims.width, dims.height) / 2.0
    return ParametricLine(
        theta=rng.uniform(0.0, math.pi - 1e-9), r=rng.uniform(-r_limit, r_limit)
    )


def random_segment(rng: np.random.Generator, dims: ImageDims):
    return segment_from_params(random_parametric_line(rng, dims), dims)


def perturbed_segment_pair(rng: np.random.Generator, dims: ImageDims):
    """A line plus a graded perturbation of it; spans the similarity range."""
    from dhtline.geometry import NoIntersectionError

    limit = 0.85 * min(dims.width, dims.height) / 2.0
    while True:
        theta = rng.uniform(0.0, math.pi)
        r = rng.uniform(-limit, limit)
        scale = rng.uniform(0.0, 1.0)
        d_theta = rng.normal(0.0, 0.5) * scale
        d_r = rng.normal(0.0, 0.3 * dims.diagonal) * scale
        try:
            a = segment_from_params(fold_parametric(theta, r), dims)
            b = segment_from_params(fold_parametric(theta + d_theta, r + d_r), dims)
        except (NoIntersectionError, ValueError):
            continue
        return a, b


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile the numba kernels once so timed tests exclude JIT cost."""
    import dhtline as d

    dims = ImageDims(8, 8)
    grid = d.grid_from_intervals(dims, math.pi / 4, 3.0)
    x = np.ones((1, 8, 8))
    d.dht_forward(x, grid)
    d.rht_adjoint(np.ones((1, grid.n_theta, grid.n_r)), grid)
    return True
