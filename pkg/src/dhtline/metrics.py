"""Pairwise line-similarity measures: EA score, Chamfer, and EMD variants.

All measures are symmetric, live in [0, 1], and equal 1 on identical lines.
Chamfer and EMD work on rasterized pixel sets and are normalized by the
image diagonal (the distance reached when two lines shrink to opposite
corners).
"""

from __future__ import annotations

import enum
import math

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .geometry import ImageDims, LineSegment
from .hough import rasterize_segment

__all__ = [
    "MetricKind",
    "angular_similarity",
    "euclidean_similarity",
    "ea_score",
    "chamfer_similarity",
    "emd_similarity",
    "similarity",
]

EMD_SAMPLES = 64


class MetricKind(enum.Enum):
    EA = "ea"
    CHAMFER = "chamfer"
    EMD = "emd"


def _direction_angle(seg: LineSegment) -> float:
    dx = seg.p1[0] - seg.p0[0]
    dy = seg.p1[1] - seg.p0[1]
    if math.hypot(dx, dy) < 1e-12:
        raise ValueError("degenerate segment")
    return math.atan2(dy, dx)


def angular_similarity(l1: LineSegment, l2: LineSegment) -> float:
    """1 minus the acute angle between the lines, scaled by pi/2."""
    diff = abs(_direction_angle(l1) - _direction_angle(l2)) % math.pi
    acute = min(diff, math.pi - diff)
    return 1.0 - acute / (math.pi / 2.0)


def euclidean_similarity(l1: LineSegment, l2: LineSegment, dims: ImageDims) -> float:
    """1 minus the midpoint distance after normalizing the image to a unit
    square; clamped at 0 (unit-square distances can reach sqrt(2))."""
    m1 = l1.midpoint
    m2 = l2.midpoint
    d = math.hypot(
        (m1[0] - m2[0]) / dims.width, (m1[1] - m2[1]) / dims.height
    )
    return max(0.0, 1.0 - d)


def ea_score(l1: LineSegment, l2: LineSegment, dims: ImageDims) -> float:
    """Squared product of angular and midpoint similarities."""
    return (angular_similarity(l1, l2) * euclidean_similarity(l1, l2, dims)) ** 2


def chamfer_similarity(l1: LineSegment, l2: LineSegment, dims: ImageDims) -> float:
    """1 minus the symmetric Chamfer distance between the rasterized lines,
    normalized by the image diagonal."""
    p1 = rasterize_segment(l1, dims).astype(np.float64)
    p2 = rasterize_segment(l2, dims).astype(np.float64)
    d = cdist(p1, p2)
    chamfer = 0.5 * (d.min(axis=1).mean() + d.min(axis=0).mean())
    return float(np.clip(1.0 - chamfer / dims.diagonal, 0.0, 1.0))


def _arc_samples(seg: LineSegment, dims: ImageDims, m: int) -> np.ndarray:
    """m points equally spaced by arc length along the rasterized pixel chain."""
    px = rasterize_segment(seg, dims).astype(np.float64)
    if px.shape[0] == 1:
        return np.repeat(px, m, axis=0)
    steps = np.hypot(np.diff(px[:, 0]), np.diff(px[:, 1]))
    arc = np.concatenate([[0.0], np.cumsum(steps)])
    targets = np.linspace(0.0, arc[-1], m)
    rows = np.interp(targets, arc, px[:, 0])
    cols = np.interp(targets, arc, px[:, 1])
    return np.stack([rows, cols], axis=1)


def emd_similarity(l1: LineSegment, l2: LineSegment, dims: ImageDims) -> float:
    """1 minus the earth mover's distance between uniform point masses
    sampled along both lines, normalized by the image diagonal.

    Each line carries EMD_SAMPLES points of mass 1/EMD_SAMPLES; the optimal
    plan is the exact minimum-cost assignment under Euclidean ground
    distance.
    """
    a = _arc_samples(l1, dims, EMD_SAMPLES)
    b = _arc_samples(l2, dims, EMD_SAMPLES)
    cost = cdist(a, b)
    ri, ci = linear_sum_assignment(cost)
    emd = cost[ri, ci].sum() / EMD_SAMPLES
    return float(np.clip(1.0 - emd / dims.diagonal, 0.0, 1.0))


def similarity(
    l1: LineSegment, l2: LineSegment, dims: ImageDims, kind: MetricKind
) -> float:
    """Dispatch to the chosen similarity measure."""
    if kind is MetricKind.EA:
        return ea_score(l1, l2, dims)
    if kind is MetricKind.CHAMFER:
        return chamfer_similarity(l1, l2, dims)
    if kind is MetricKind.EMD:
        return emd_similarity(l1, l2, dims)
    raise ValueError(f"unknown metric kind: {kind!r}")
