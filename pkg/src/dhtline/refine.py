"""Edge-guided line refinement: Sobel edges, band density, and boundary search."""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from .geometry import ImageDims, LineSegment, boundary_walk
from .hough import rasterize_segment

__all__ = ["sobel_edge_map", "edge_density", "refine_line", "DEFAULT_DELTA_R"]

DEFAULT_DELTA_R = 5


def sobel_edge_map(img: np.ndarray) -> np.ndarray:
    """Gradient-magnitude edge map of a grayscale image in [0, 1].

    3x3 Sobel filters with replicated borders; the result is scaled by its
    maximum so values land in [0, 1] (an all-constant image stays all-zero).
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 3:
        if img.shape[0] != 1:
            raise ValueError(f"expected a single-channel image, got shape {img.shape}")
        img = img[0]
    if img.ndim != 2:
        raise ValueError(f"expected an (H, W) image, got shape {img.shape}")
    gx = ndimage.sobel(img, axis=1, mode="nearest")
    gy = ndimage.sobel(img, axis=0, mode="nearest")
    mag = np.hypot(gx, gy)
    peak = mag.max()
    return mag / peak if peak > 0.0 else mag


def _band_pixels(seg: LineSegment, dims: ImageDims) -> np.ndarray:
    """3-pixel-wide band along the segment: each line pixel plus its two
    neighbors offset perpendicular to the dominant direction, de-duplicated."""
    px = rasterize_segment(seg, dims)
    dx = abs(seg.p1[0] - seg.p0[0])
    dy = abs(seg.p1[1] - seg.p0[1])
    if dx >= dy:
        offsets = np.array([[-1, 0], [0, 0], [1, 0]])  # widen across rows
    else:
        offsets = np.array([[0, -1], [0, 0], [0, 1]])  # widen across cols
    band = (px[None, :, :] + offsets[:, None, :]).reshape(-1, 2)
    keep = (
        (band[:, 0] >= 0)
        & (band[:, 0] < dims.height)
        & (band[:, 1] >= 0)
        & (band[:, 1] < dims.width)
    )
    return np.unique(band[keep], axis=0)


def edge_density(seg: LineSegment, edges: np.ndarray) -> float:
    """Mean edge response over the widened 3-pixel band of a segment."""
    edges = np.asarray(edges, dtype=np.float64)
    if edges.ndim != 2:
        raise ValueError(f"expected an (H, W) edge map, got shape {edges.shape}")
    dims = ImageDims(width=edges.shape[1], height=edges.shape[0])
    band = _band_pixels(seg, dims)
    if band.shape[0] == 0:
        raise ValueError("segment rasterizes to no pixels inside the image")
    return float(edges[band[:, 0], band[:, 1]].mean())


def refine_line(seg: LineSegment, edges: np.ndarray, delta_r: int) -> LineSegment:
    """Pick the densest segment among boundary-perturbed candidates.

    Each endpoint independently takes delta_r + 1 arc-length offsets
    {-ceil(delta_r/2), ..., +floor(delta_r/2)} along the image boundary,
    giving (delta_r + 1)^2 candidates including the input. Ties prefer the
    input segment, then the smallest total offset, then lexicographic
    offset order. delta_r = 0 returns the input unchanged.
    """
    if delta_r < 0:
        raise ValueError(f"delta_r must be non-negative, got {delta_r}")
    edges = np.asarray(edges, dtype=np.float64)
    dims = ImageDims(width=edges.shape[1], height=edges.shape[0])
    offsets = range(-math.ceil(delta_r / 2), math.floor(delta_r / 2) + 1)

    best: tuple | None = None
    for o0 in offsets:
        for o1 in offsets:
            try:
                cand = seg if (o0, o1) == (0, 0) else boundary_walk(seg, dims, o0, o1)
                rho = edge_density(cand, edges)
            except ValueError:
                continue
            key = (-rho, (o0, o1) != (0, 0), abs(o0) + abs(o1), o0, o1)
            if best is None or key < best[0]:
                best = (key, cand)
    if best is None:
        raise ValueError("all refinement candidates were degenerate")
    return best[1]
